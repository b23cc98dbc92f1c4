#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wbsense/ged.hpp"
#include "wbsense/optimizer.hpp"
#include "wbsense/refdet.hpp"

using namespace wbsense;
using namespace wbsense::optimizer;

namespace {

ThroughputParams paper_params(double frame_s, NoiseKnowledge knowledge = NoiseKnowledge::kEstimated) {
  DetectorConfig det;
  det.frame_duration_s = frame_s;
  const auto layout = edgedet::SubBandLayout::equal_bands(60e6, 10);
  return build_params(layout, 0, det, uniform_priors(layout, det.prior_h0), knowledge);
}

double floor_s() { return refdet::tw_min(60e6, {mathkit::Probability(0.999), 0.01}); }

// Throughput rebuilt from per-band detection rates: each band's threshold is
// set for the target Pd, and its false-alarm rate follows from ged_pf.
double throughput_from_rates(double t, double frame_s, bool perfect) {
  const double snr = 0.01;
  const double c0 = std::log2(101.0);
  const double c1 = std::log2(1.0 + 100.0 / 1.01);
  const double beta = perfect ? std::numeric_limits<double>::infinity() : 1.0;
  double sum = 0.0;
  for (int k = 1; k < 10; ++k) {
    const double lambda = ged::threshold_for_target_pd(mathkit::Probability(0.9), snr, t, 6e6, beta);
    const double pf = ged::ged_pf(lambda).value();
    sum += 0.8 * (1.0 - pf) * c0 + 0.2 * (1.0 - 0.9) * c1;
  }
  return (frame_s - t) / frame_s * sum;
}

}  // namespace

TEST_CASE("objective agrees with the rate-based construction") {
  for (double t : {0.0, 1e-3, 6.5e-3, 0.03, 0.25, 1.9}) {
    CHECK(throughput(t, paper_params(2.0)) == doctest::Approx(throughput_from_rates(t, 2.0, false)).epsilon(1e-12));
    CHECK(throughput(t, paper_params(2.0, NoiseKnowledge::kPerfect)) ==
          doctest::Approx(throughput_from_rates(t, 2.0, true)).epsilon(1e-12));
  }
  CHECK(throughput(2.0, paper_params(2.0)) == 0.0);
  CHECK_THROWS_AS(throughput(-1e-9, paper_params(2.0)), std::domain_error);
  CHECK_THROWS_AS(throughput(2.1, paper_params(2.0)), std::domain_error);
}

TEST_CASE("analytic derivatives match finite differences") {
  for (const auto knowledge : {NoiseKnowledge::kEstimated, NoiseKnowledge::kPerfect}) {
    const auto params = paper_params(2.0, knowledge);
    for (double t : {2e-3, 6.5e-3, 0.02, 0.05, 0.3, 1.5}) {
      CAPTURE(t);
      const double h = 1e-4 * t;
      const auto d = throughput_derivatives(t, params);
      const double fd1 = (throughput(t + h, params) - throughput(t - h, params)) / (2.0 * h);
      const double fd2 = (throughput_derivatives(t + h, params).first - throughput_derivatives(t - h, params).first) / (2.0 * h);
      CHECK(d.first == doctest::Approx(fd1).epsilon(1e-6).scale(1e-3));
      CHECK(d.second == doctest::Approx(fd2).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(throughput_derivatives(0.0, paper_params(2.0)), std::domain_error);
  CHECK_THROWS_AS(throughput_derivatives(2.0, paper_params(2.0)), std::domain_error);
}

TEST_CASE("concave wherever every a sqrt(T) + b >= 0") {
  const auto params = paper_params(2.0);
  for (double t = 1e-3; t < 2.0; t *= 1.1) {
    bool valid = true;
    for (const auto& b : params.bands) valid = valid && b.a * std::sqrt(t) + b.b >= 0.0;
    if (valid) CHECK(throughput_derivatives(t, params).second < 0.0);
  }
}

TEST_CASE("optimal sensing times") {
  // Frozen from an independent scipy root solve of f'(T) = 0.
  const auto ged_opt = optimal_sensing_time(paper_params(2.0), floor_s());
  const auto ced_opt = optimal_sensing_time(paper_params(2.0, NoiseKnowledge::kPerfect), floor_s());
  CHECK(ged_opt.t_o_s == doctest::Approx(50.55e-3).epsilon(1e-3));
  CHECK(ced_opt.t_o_s == doctest::Approx(28.44e-3).epsilon(1e-3));
  CHECK(std::fabs(ged_opt.t_o_s - 50.6e-3) <= 1e-3);
  CHECK(std::fabs(ced_opt.t_o_s - 28.5e-3) <= 1e-3);
  CHECK_FALSE(ged_opt.at_boundary);
  CHECK(ged_opt.concavity_precondition);
  CHECK(std::fabs(throughput_derivatives(ged_opt.t_o_s, paper_params(2.0)).first) < 1e-3);
  CHECK(std::fabs(grid_search_optimum(paper_params(2.0), floor_s(), 1e-4) - ged_opt.t_o_s) <= 1.01e-4);

  CHECK(optimal_sensing_time(paper_params(0.1), floor_s()).t_o_s == doctest::Approx(20.88e-3).epsilon(1e-3));
  CHECK(optimal_sensing_time(paper_params(1.2), floor_s()).t_o_s == doctest::Approx(45.78e-3).epsilon(1e-3));
}

TEST_CASE("boundary optimum is flagged") {
  // A frame barely longer than the floor leaves no room for an interior root.
  const auto params = paper_params(8e-3);
  const auto opt = optimal_sensing_time(params, floor_s());
  CHECK(opt.at_boundary);
  CHECK_THROWS_AS(optimal_sensing_time(paper_params(5e-3), floor_s()), std::invalid_argument);
}

TEST_CASE("parameter construction") {
  DetectorConfig det;
  const edgedet::SubBandLayout layout{60e6, {-30e6, -20e6, -6e6, 4e6, 18e6, 30e6}};
  const auto p = build_params(layout, 2, det, uniform_priors(layout, 0.8));
  REQUIRE(p.bands.size() == 4);
  CHECK(p.bands[0].subband_index == 0);
  CHECK(p.bands[2].subband_index == 3);
  // SB4 (14 MHz) against a 10 MHz reference.
  const double beta = 10.0 / 14.0;
  CHECK(p.bands[2].a == doctest::Approx(std::sqrt(beta * 14e6 / (beta + 1.0)) * 0.01));
  CHECK(p.bands[2].b == doctest::Approx(std::sqrt(2.0) * 1.01 * mathkit::erfc_inv(1.8)));
  CHECK(p.bands[2].psi == doctest::Approx(0.4 * std::log2(101.0)));
  CHECK_THROWS_AS(build_params(layout, 5, det, uniform_priors(layout, 0.8)), std::out_of_range);
  CHECK_THROWS_AS(build_params(layout, 0, det, OccupancyPriors(2, {0.8, 0.2})), std::invalid_argument);
  CHECK_THROWS_AS(build_params(layout, 0, det, OccupancyPriors(5, {0.8, 0.3})), std::invalid_argument);
}
