#pragma once

// Ratio-based sub-band edge detection accumulated over L - 1 frames.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wbsense/mathkit.hpp"
#include "wbsense/spectral.hpp"

namespace wbsense::edgedet {

using mathkit::Probability;

/// Sub-band partition of [-B/2, B/2]. Edges are sorted and include both ends.
struct SubBandLayout {
  double total_bandwidth_hz = 0.0;
  std::vector<double> edges_hz;

  [[nodiscard]] std::size_t count() const { return edges_hz.size() < 2 ? 0 : edges_hz.size() - 1; }
  [[nodiscard]] double width_hz(std::size_t band) const { return edges_hz[band + 1] - edges_hz[band]; }
  [[nodiscard]] std::vector<double> widths_hz() const;
  /// Bin partition on an n-bin centered axis; adjacent ranges share endpoints.
  [[nodiscard]] std::vector<spectral::BinRange> band_bins(std::size_t n_bins) const;

  /// Throws std::invalid_argument unless: ends at +-B/2, strictly increasing,
  /// 2 <= count <= s_max, and every width >= b_min_hz - tolerance_hz.
  void validate(double b_min_hz, std::size_t s_max, double tolerance_hz = 0.0) const;

  static SubBandLayout equal_halves(double total_bandwidth_hz);
  static SubBandLayout equal_bands(double total_bandwidth_hz, std::size_t count);
};

/// Per-frame mean of the edge statistic under an edge. The published
/// expression uses sqrt(N_eh) * gamma; the value implied by the unit-variance
/// normalisation of the statistic is sqrt(N_eh / 2) * gamma.
enum class EdgeMeanConvention { kUnitVariance, kPublished };

struct EdgeScanConfig {
  double b_min_hz = 0.0;
  std::size_t s_max = 0;
  std::size_t frames = 0;  // L; 0 until solved
  double frame_sense_duration_s = 0.0;
  Probability target_pf{0.001};
  Probability target_pd{0.999};
  double design_snr = 0.0;
  EdgeMeanConvention convention = EdgeMeanConvention::kUnitVariance;
  std::size_t max_frames = 2000;

  [[nodiscard]] double total_bandwidth_hz() const { return b_min_hz * static_cast<double>(s_max); }
  /// floor(T_te * B_min / 2)
  [[nodiscard]] std::size_t half_window_bins() const;
  void validate() const;
};

struct EdgeStatVector {
  std::vector<double> q;
  spectral::BinRange valid_range;
  std::size_t frames_accumulated = 0;
};

class InfeasibleTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signed per-frame statistic sqrt(n_eh/2) (left_mean / right_mean - 1).
double edge_statistic(double left_mean, double right_mean, std::size_t n_eh);

/// Squared statistic sqrt(n_eh/2) * (left_mean / right_mean - 1) for every
/// center j in [n_eh, N - n_eh); the left half is [j - n_eh, j) and the right
/// half [j, j + n_eh). Entries outside the valid range are zero.
std::vector<double> frame_edge_stats(std::span<const double> psd, std::size_t n_eh);

/// Streaming elementwise sum of per-frame squared statistics.
class EdgeAccumulator {
 public:
  EdgeAccumulator(std::size_t n_bins, std::size_t n_eh);

  void add_frame_stats(std::span<const double> frame_stats);
  void add_psd(std::span<const double> psd);
  [[nodiscard]] const EdgeStatVector& result() const { return stats_; }
  [[nodiscard]] std::size_t frames() const { return stats_.frames_accumulated; }
  void reset();

 private:
  std::size_t n_eh_;
  EdgeStatVector stats_;
};

EdgeStatVector accumulate_frames(const std::vector<std::vector<double>>& per_frame_stats, std::size_t n_eh);

/// Pr(R_eL > lambda | no edge) = chi2_sf(lambda, L - 1).
Probability edge_pf(double lambda, std::size_t frames);

/// Per-frame means under a falling (first) and rising (second) edge.
std::pair<double, double> edge_means(double snr, std::size_t n_eh, EdgeMeanConvention convention);

/// min over falling/rising edge hypotheses of the noncentral chi-square
/// survival of R_eL at lambda.
Probability edge_pd(double lambda, std::size_t frames, double snr, std::size_t n_eh,
                    EdgeMeanConvention convention = EdgeMeanConvention::kUnitVariance);

struct FrameCountSolution {
  std::size_t frames = 0;  // L
  double lambda = 0.0;
  std::size_t n_eh = 0;
  Probability pd{0.0};
};

/// Smallest L >= 2 meeting both targets. Throws InfeasibleTarget beyond max_frames.
FrameCountSolution solve_frame_count(const EdgeScanConfig& config);

/// Greedy argmax extraction. A position is an edge while q[j] >= lambda;
/// each accepted edge zeroes every position strictly closer than b_min_bins.
/// Positions strictly closer than b_min_bins to either end of the span are
/// never edges. With no edges the equal-halves layout is returned.
SubBandLayout extract_edges(const EdgeStatVector& stats, double lambda, std::size_t b_min_bins,
                            double total_bandwidth_hz);

/// Centered bins of the interior edges returned by the last extraction step,
/// in detection order; exposed for histogramming.
std::vector<std::size_t> extract_edge_bins(const EdgeStatVector& stats, double lambda, std::size_t b_min_bins);

}  // namespace wbsense::edgedet
