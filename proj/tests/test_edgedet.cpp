#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cmath>
#include <vector>

#include "wbsense/edgedet.hpp"
#include "wbsense/random.hpp"

using namespace wbsense;
using namespace wbsense::edgedet;

namespace {

EdgeScanConfig paper_scan(EdgeMeanConvention convention) {
  EdgeScanConfig c;
  c.b_min_hz = 6e6;
  c.s_max = 10;
  c.frame_sense_duration_s = 6.494320916e-3;  // T_wmin for B = 60 MHz at -20 dB
  c.design_snr = 0.01;
  c.convention = convention;
  return c;
}

// Frame count recomputed from Boost distributions alone, using the same
// noncentrality mu^2 (L - 1) and scaled threshold lambda / sigma^2.
std::size_t oracle_frames(const EdgeScanConfig& c) {
  const double n = static_cast<double>(c.half_window_bins());
  const double scale = c.convention == EdgeMeanConvention::kPublished ? std::sqrt(n) : std::sqrt(n / 2.0);
  const double g = c.design_snr;
  for (std::size_t frames = 2;; ++frames) {
    const double dof = static_cast<double>(frames - 1);
    const double lambda = boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), c.target_pf.value()));
    const double mu1 = scale * g;
    const double mu2 = scale * g / (1.0 + g);
    const double s1 = 1.0 + g;
    const double s2 = 1.0 / (1.0 + g);
    const double pd1 = boost::math::cdf(boost::math::complement(
        boost::math::non_central_chi_squared(dof, mu1 * mu1 * dof), lambda / (s1 * s1)));
    const double pd2 = boost::math::cdf(boost::math::complement(
        boost::math::non_central_chi_squared(dof, mu2 * mu2 * dof), lambda / (s2 * s2)));
    if (std::min(pd1, pd2) >= c.target_pd.value()) return frames;
  }
}

}  // namespace

TEST_CASE("statistic on flat and stepped spectra") {
  const std::size_t n_eh = 50;
  const std::vector<double> flat(400, 3.0);
  const auto s = frame_edge_stats(flat, n_eh);
  for (double v : s) CHECK(v == doctest::Approx(0.0));

  std::vector<double> step(400, 1.0);
  for (std::size_t i = 200; i < 400; ++i) step[i] = 2.0;
  const auto q = frame_edge_stats(step, n_eh);
  CHECK(std::max_element(q.begin(), q.end()) - q.begin() == 200);
  CHECK(q[200] == doctest::Approx(0.5 * n_eh * 0.25));
  CHECK(q[0] == 0.0);
  CHECK(q[349] == doctest::Approx(0.0));
  CHECK(q[350] == 0.0);  // outside the valid range
  const double r = edge_statistic(1.0, 2.0, n_eh);
  CHECK(r * r == doctest::Approx(q[200]));
}

TEST_CASE("statistic preconditions") {
  CHECK_THROWS_AS(frame_edge_stats(std::vector<double>(10, 1.0), 1), std::invalid_argument);
  CHECK_THROWS_AS(frame_edge_stats(std::vector<double>(10, 1.0), 6), std::invalid_argument);
  std::vector<double> holes(40, 1.0);
  for (std::size_t i = 20; i < 40; ++i) holes[i] = 0.0;
  CHECK_THROWS_AS(frame_edge_stats(holes, 10), std::domain_error);
  CHECK_NOTHROW(frame_edge_stats(std::vector<double>(40, 0.0), 10));
  CHECK_THROWS_AS(edge_statistic(1.0, 0.0, 10), std::domain_error);
}

TEST_CASE("ratio statistics are scale invariant") {
  Rng rng = make_stream(2, 0);
  boost::random::exponential_distribution<double> e;
  std::vector<double> p(2000);
  for (auto& v : p) v = e(rng);
  auto scaled = p;
  for (auto& v : scaled) v *= 37.5;
  const auto a = frame_edge_stats(p, 100);
  const auto b = frame_edge_stats(scaled, 100);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("unit variance of the normalized ratio under H0") {
  // Sufficient statistics: white window sums are Gamma(n_eh).
  Rng pick = make_stream(3, 0);
  boost::random::uniform_int_distribution<std::size_t> choose(1000, 10000);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n_eh = choose(pick);
    Rng rng = make_stream(4, static_cast<std::uint64_t>(rep));
    boost::random::gamma_distribution<double> gamma(static_cast<double>(n_eh));
    double sum = 0.0;
    double sum2 = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      const double r = edge_statistic(gamma(rng), gamma(rng), n_eh);
      sum += r;
      sum2 += r * r;
    }
    const double mean = sum / trials;
    const double var = sum2 / trials - mean * mean;
    CAPTURE(n_eh);
    CHECK(var >= 0.9);
    CHECK(var <= 1.1);
  }
  // Same property through the full per-bin path at independent centers.
  const std::size_t n_eh = 1000;
  const std::size_t blocks = 100;
  Rng rng = make_stream(5, 0);
  boost::random::exponential_distribution<double> e;
  double sum2 = 0.0;
  std::size_t count = 0;
  for (int frame = 0; frame < 100; ++frame) {
    std::vector<double> p(2 * n_eh * blocks);
    for (auto& v : p) v = e(rng);
    const auto q = frame_edge_stats(p, n_eh);
    for (std::size_t b = 0; b + 1 < blocks; ++b) {
      sum2 += q[n_eh + 2 * n_eh * b];
      ++count;
    }
  }
  CHECK(sum2 / static_cast<double>(count) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("accumulator sums frames") {
  std::vector<double> step(400, 1.0);
  for (std::size_t i = 200; i < 400; ++i) step[i] = 4.0;
  EdgeAccumulator acc(400, 50);
  acc.add_psd(step);
  acc.add_psd(step);
  CHECK(acc.frames() == 2);
  CHECK(acc.result().q[200] == doctest::Approx(2.0 * 25.0 * 0.5625));
  CHECK(acc.result().valid_range == spectral::BinRange{50, 350});
  const auto via_list = accumulate_frames({frame_edge_stats(step, 50), frame_edge_stats(step, 50)}, 50);
  CHECK(via_list.q == acc.result().q);
  CHECK_THROWS_AS(acc.add_psd(std::vector<double>(300, 1.0)), std::invalid_argument);
  acc.reset();
  CHECK(acc.frames() == 0);
  CHECK_THROWS_AS(EdgeAccumulator(10, 6), std::invalid_argument);
}

TEST_CASE("false-alarm and detection probabilities") {
  CHECK(edge_pf(mathkit::chi2_quantile(mathkit::Probability(0.001), 54.0), 55).value() == doctest::Approx(0.001));
  const auto [mu1, mu2] = edge_means(0.01, 19482, EdgeMeanConvention::kUnitVariance);
  CHECK(mu1 == doctest::Approx(std::sqrt(19482.0 / 2.0) * 0.01));
  CHECK(mu2 == doctest::Approx(-std::sqrt(19482.0 / 2.0) * 0.01 / 1.01));
  CHECK(edge_means(0.01, 19482, EdgeMeanConvention::kPublished).first == doctest::Approx(std::sqrt(19482.0) * 0.01));
  // Pd grows with frames at the matching threshold.
  double prev = 0.0;
  for (std::size_t frames : {10u, 30u, 60u, 120u}) {
    const double lambda = mathkit::chi2_quantile(mathkit::Probability(0.001), static_cast<double>(frames - 1));
    const double pd = edge_pd(lambda, frames, 0.01, 19482).value();
    CHECK(pd > prev);
    prev = pd;
  }
  CHECK_THROWS_AS(edge_pf(1.0, 1), std::invalid_argument);
}

TEST_CASE("frame count for the evaluation setup") {
  const auto published = solve_frame_count(paper_scan(EdgeMeanConvention::kPublished));
  CHECK(published.n_eh == 19482);
  CHECK(published.frames == oracle_frames(paper_scan(EdgeMeanConvention::kPublished)));
  CHECK(published.frames >= 52);
  CHECK(published.frames <= 58);
  CHECK(published.pd.value() >= 0.999);

  const auto unit = solve_frame_count(paper_scan(EdgeMeanConvention::kUnitVariance));
  CHECK(unit.frames == oracle_frames(paper_scan(EdgeMeanConvention::kUnitVariance)));
  CHECK(unit.frames == 160);
  CHECK(unit.lambda == doctest::Approx(219.8460461433745).epsilon(1e-9));

  auto tight = paper_scan(EdgeMeanConvention::kUnitVariance);
  tight.max_frames = 20;
  CHECK_THROWS_AS(solve_frame_count(tight), InfeasibleTarget);
  auto bad = paper_scan(EdgeMeanConvention::kUnitVariance);
  bad.frame_sense_duration_s = 1e-9;
  CHECK_THROWS_AS(solve_frame_count(bad), std::invalid_argument);
}

TEST_CASE("greedy extraction with minimum spacing") {
  EdgeStatVector s;
  s.q.assign(1000, 0.0);
  s.q[300] = 50.0;
  s.q[350] = 60.0;  // within b_min of 300: suppresses it
  s.q[600] = 40.0;
  s.q[700] = 40.0;  // exactly b_min from 600: survives
  s.q[950] = 99.0;  // closer than b_min to the upper end
  s.q[20] = 99.0;   // closer than b_min to the lower end
  const auto bins = extract_edge_bins(s, 30.0, 100);
  CHECK(bins == std::vector<std::size_t>{350, 600, 700});
  const auto layout = extract_edges(s, 30.0, 100, 1e6);
  CHECK(layout.count() == 4);
  CHECK(layout.edges_hz.front() == doctest::Approx(-0.5e6));
  CHECK(layout.edges_hz[1] == doctest::Approx(-0.5e6 + 350.0 * 1e3));
  CHECK(layout.edges_hz.back() == doctest::Approx(0.5e6));

  // Ties go to the lowest bin.
  EdgeStatVector tie;
  tie.q.assign(1000, 0.0);
  tie.q[400] = 10.0;
  tie.q[450] = 10.0;
  CHECK(extract_edge_bins(tie, 5.0, 100) == std::vector<std::size_t>{400});

  // Nothing above threshold: two equal halves.
  const auto fallback = extract_edges(tie, 11.0, 100, 6e7);
  CHECK(fallback.edges_hz == std::vector<double>{-3e7, 0.0, 3e7});
  CHECK_THROWS_AS(extract_edge_bins(tie, 1.0, 0), std::invalid_argument);
}

TEST_CASE("layout validation") {
  const auto five = SubBandLayout{60e6, {-30e6, -20e6, -6e6, 4e6, 18e6, 30e6}};
  CHECK_NOTHROW(five.validate(6e6, 10));
  CHECK(five.widths_hz() == std::vector<double>{10e6, 14e6, 10e6, 14e6, 12e6});
  CHECK_THROWS_AS(five.validate(12e6, 10), std::invalid_argument);
  CHECK_THROWS_AS(five.validate(6e6, 4), std::invalid_argument);
  CHECK_THROWS_AS((SubBandLayout{60e6, {-30e6, 30e6}}).validate(6e6, 10), std::invalid_argument);
  CHECK_THROWS_AS((SubBandLayout{60e6, {-30e6, 5e6, 1e6, 30e6}}).validate(1e6, 10), std::invalid_argument);
  CHECK(SubBandLayout::equal_bands(60e6, 10).widths_hz() == std::vector<double>(10, 6e6));
}
