#include "wbsense/edgedet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wbsense::edgedet {

using spectral::BinRange;

std::vector<double> SubBandLayout::widths_hz() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < count(); ++i) out.push_back(width_hz(i));
  return out;
}

std::vector<BinRange> SubBandLayout::band_bins(std::size_t n_bins) const {
  std::vector<BinRange> out;
  for (std::size_t i = 0; i < count(); ++i) {
    out.push_back({spectral::freq_to_bin(edges_hz[i], n_bins, total_bandwidth_hz),
                   spectral::freq_to_bin(edges_hz[i + 1], n_bins, total_bandwidth_hz)});
  }
  return out;
}

void SubBandLayout::validate(double b_min_hz, std::size_t s_max, double tolerance_hz) const {
  const double tol = 1e-9 * total_bandwidth_hz;
  if (count() < 2) throw std::invalid_argument("layout: fewer than two sub-bands");
  if (count() > s_max) throw std::invalid_argument("layout: more than s_max sub-bands");
  if (std::fabs(edges_hz.front() + 0.5 * total_bandwidth_hz) > tol ||
      std::fabs(edges_hz.back() - 0.5 * total_bandwidth_hz) > tol) {
    throw std::invalid_argument("layout: edges must span [-B/2, B/2]");
  }
  for (std::size_t i = 0; i < count(); ++i) {
    if (!(width_hz(i) > 0.0)) throw std::invalid_argument("layout: edges not strictly increasing");
    if (width_hz(i) < b_min_hz - tolerance_hz - tol) {
      throw std::invalid_argument("layout: sub-band " + std::to_string(i + 1) + " narrower than B_min");
    }
  }
}

SubBandLayout SubBandLayout::equal_halves(double total_bandwidth_hz) { return equal_bands(total_bandwidth_hz, 2); }

SubBandLayout SubBandLayout::equal_bands(double total_bandwidth_hz, std::size_t count) {
  SubBandLayout layout{total_bandwidth_hz, {}};
  for (std::size_t i = 0; i <= count; ++i) {
    layout.edges_hz.push_back(-0.5 * total_bandwidth_hz +
                              total_bandwidth_hz * static_cast<double>(i) / static_cast<double>(count));
  }
  return layout;
}

std::size_t EdgeScanConfig::half_window_bins() const {
  return static_cast<std::size_t>(std::floor(0.5 * frame_sense_duration_s * b_min_hz + 1e-6));
}

void EdgeScanConfig::validate() const {
  if (!(b_min_hz > 0.0) || s_max < 2) throw std::invalid_argument("edge scan: need b_min_hz > 0 and s_max >= 2");
  if (!(frame_sense_duration_s > 0.0)) throw std::invalid_argument("edge scan: sensing duration must be > 0");
  if (!(target_pf.value() > 0.0 && target_pf.value() < 1.0) ||
      !(target_pd.value() > 0.0 && target_pd.value() < 1.0)) {
    throw std::invalid_argument("edge scan: targets must lie in (0, 1)");
  }
  if (frames == 1) throw std::invalid_argument("edge scan: frames must be >= 2");
  if (!(design_snr > 0.0)) throw std::invalid_argument("edge scan: design snr must be > 0");
  if (half_window_bins() < 2) throw std::invalid_argument("edge scan: half window shorter than two bins");
}

namespace {

// Writes (or adds) the squared statistic for every valid center into out.
void edge_stats_into(std::span<const double> psd, std::size_t n_eh, double* out, bool add) {
  if (n_eh < 2) throw std::invalid_argument("frame_edge_stats: n_eh must be >= 2");
  const std::size_t n = psd.size();
  if (n < 2 * n_eh) throw std::invalid_argument("frame_edge_stats: psd shorter than 2 * n_eh");
  const spectral::PrefixEnergy prefix(psd);
  const double scale2 = 0.5 * static_cast<double>(n_eh);
  for (std::size_t j = n_eh; j < n - n_eh; ++j) {
    const double left = prefix.sum({j - n_eh, j});
    const double right = prefix.sum({j, j + n_eh});
    double value = 0.0;
    if (right == 0.0) {
      if (left != 0.0) throw std::domain_error("frame_edge_stats: zero energy in right window");
    } else {
      const double r = left / right - 1.0;
      value = scale2 * r * r;
    }
    out[j] = add ? out[j] + value : value;
  }
}

}  // namespace

double edge_statistic(double left_mean, double right_mean, std::size_t n_eh) {
  if (!(right_mean > 0.0)) throw std::domain_error("edge_statistic: right window mean must be > 0");
  return std::sqrt(0.5 * static_cast<double>(n_eh)) * (left_mean / right_mean - 1.0);
}

std::vector<double> frame_edge_stats(std::span<const double> psd, std::size_t n_eh) {
  std::vector<double> out(psd.size(), 0.0);
  edge_stats_into(psd, n_eh, out.data(), false);
  return out;
}

EdgeAccumulator::EdgeAccumulator(std::size_t n_bins, std::size_t n_eh) : n_eh_(n_eh) {
  if (n_bins < 2 * n_eh) throw std::invalid_argument("edge accumulator: n_bins < 2 * n_eh");
  stats_.q.assign(n_bins, 0.0);
  stats_.valid_range = {n_eh, n_bins - n_eh};
}

void EdgeAccumulator::add_frame_stats(std::span<const double> frame_stats) {
  if (frame_stats.size() != stats_.q.size()) throw std::invalid_argument("edge accumulator: length mismatch");
  for (std::size_t i = 0; i < frame_stats.size(); ++i) stats_.q[i] += frame_stats[i];
  ++stats_.frames_accumulated;
}

void EdgeAccumulator::add_psd(std::span<const double> psd) {
  if (psd.size() != stats_.q.size()) throw std::invalid_argument("edge accumulator: length mismatch");
  edge_stats_into(psd, n_eh_, stats_.q.data(), true);
  ++stats_.frames_accumulated;
}

void EdgeAccumulator::reset() {
  std::fill(stats_.q.begin(), stats_.q.end(), 0.0);
  stats_.frames_accumulated = 0;
}

EdgeStatVector accumulate_frames(const std::vector<std::vector<double>>& per_frame_stats, std::size_t n_eh) {
  if (per_frame_stats.empty()) throw std::invalid_argument("accumulate_frames: no frames");
  EdgeAccumulator acc(per_frame_stats.front().size(), n_eh);
  for (const auto& frame : per_frame_stats) acc.add_frame_stats(frame);
  return acc.result();
}

Probability edge_pf(double lambda, std::size_t frames) {
  if (frames < 2) throw std::invalid_argument("edge_pf: frames must be >= 2");
  return mathkit::chi2_sf(lambda, static_cast<double>(frames - 1));
}

std::pair<double, double> edge_means(double snr, std::size_t n_eh, EdgeMeanConvention convention) {
  const double n = static_cast<double>(n_eh);
  const double scale = convention == EdgeMeanConvention::kPublished ? std::sqrt(n) : std::sqrt(0.5 * n);
  return {scale * snr, -scale * snr / (1.0 + snr)};
}

Probability edge_pd(double lambda, std::size_t frames, double snr, std::size_t n_eh, EdgeMeanConvention convention) {
  if (frames < 2) throw std::invalid_argument("edge_pd: frames must be >= 2");
  if (!(lambda >= 0.0)) throw std::invalid_argument("edge_pd: lambda must be >= 0");
  if (!(snr >= 0.0)) throw std::invalid_argument("edge_pd: snr must be >= 0");
  const double dof = static_cast<double>(frames - 1);
  const auto [mu1, mu2] = edge_means(snr, n_eh, convention);
  const double sigma1 = 1.0 + snr;
  const double sigma2 = 1.0 / (1.0 + snr);
  const double root_lambda = std::sqrt(lambda);
  const Probability falling = mathkit::marcum_q(0.5 * dof, std::sqrt(mu1 * mu1 * dof), root_lambda / sigma1);
  const Probability rising = mathkit::marcum_q(0.5 * dof, std::sqrt(mu2 * mu2 * dof), root_lambda / sigma2);
  return falling.value() < rising.value() ? falling : rising;
}

FrameCountSolution solve_frame_count(const EdgeScanConfig& config) {
  config.validate();
  const std::size_t n_eh = config.half_window_bins();
  for (std::size_t frames = 2; frames <= config.max_frames; ++frames) {
    const double lambda = mathkit::chi2_quantile(config.target_pf, static_cast<double>(frames - 1));
    const Probability pd = edge_pd(lambda, frames, config.design_snr, n_eh, config.convention);
    if (pd.value() >= config.target_pd.value()) return {frames, lambda, n_eh, pd};
  }
  throw InfeasibleTarget("solve_frame_count: no L <= " + std::to_string(config.max_frames) +
                         " meets the edge detection target at the design SNR");
}

std::vector<std::size_t> extract_edge_bins(const EdgeStatVector& stats, double lambda, std::size_t b_min_bins) {
  std::vector<double> q = stats.q;
  const std::size_t n = q.size();
  if (b_min_bins == 0) throw std::invalid_argument("extract_edges: b_min_bins must be >= 1");
  // Span ends act as fixed edges: nothing strictly closer than b_min_bins.
  for (std::size_t j = 0; j < n && j < b_min_bins; ++j) q[j] = 0.0;
  for (std::size_t j = (n > b_min_bins ? n - b_min_bins + 1 : 0); j < n; ++j) q[j] = 0.0;

  std::vector<std::size_t> edges;
  while (true) {
    const auto it = std::max_element(q.begin(), q.end());  // first maximum: lowest bin wins ties
    if (it == q.end() || *it < lambda || *it <= 0.0) break;
    const auto j = static_cast<std::size_t>(it - q.begin());
    edges.push_back(j);
    const std::size_t lo = j >= b_min_bins - 1 ? j - (b_min_bins - 1) : 0;
    const std::size_t hi = std::min(n, j + b_min_bins);
    std::fill(q.begin() + static_cast<std::ptrdiff_t>(lo), q.begin() + static_cast<std::ptrdiff_t>(hi), 0.0);
  }
  return edges;
}

SubBandLayout extract_edges(const EdgeStatVector& stats, double lambda, std::size_t b_min_bins,
                            double total_bandwidth_hz) {
  auto bins = extract_edge_bins(stats, lambda, b_min_bins);
  if (bins.empty()) return SubBandLayout::equal_halves(total_bandwidth_hz);
  std::sort(bins.begin(), bins.end());
  SubBandLayout layout{total_bandwidth_hz, {-0.5 * total_bandwidth_hz}};
  for (const auto bin : bins) layout.edges_hz.push_back(spectral::bin_to_freq(bin, stats.q.size(), total_bandwidth_hz));
  layout.edges_hz.push_back(0.5 * total_bandwidth_hz);
  return layout;
}

}  // namespace wbsense::edgedet
