#pragma once

// Sensing-time optimization of the frame throughput
//
//   f(T) = (T_f - T) / T_f * sum_k [ psi_k erf((a_k sqrt(T) + b_k) / sqrt 2) + psi~_k ]
//
// which is concave wherever every a_k sqrt(T) + b_k >= 0.

#include <cstddef>
#include <utility>
#include <vector>

#include "wbsense/config.hpp"
#include "wbsense/edgedet.hpp"
#include "wbsense/mathkit.hpp"

namespace wbsense::optimizer {

struct BandCoefficients {
  std::size_t subband_index = 0;
  double a = 0.0;  // 1/sqrt(s)
  double b = 0.0;
  double psi = 0.0;
  double psi_tilde = 0.0;
};

struct ThroughputParams {
  double frame_duration_s = 0.0;
  std::vector<BandCoefficients> bands;
  double cr_snr = 0.0;
  std::vector<double> p_h0;
  std::vector<double> p_h1;
  mathkit::Probability target_pd{0.9};
};

/// Estimated: the reference band supplies the noise level (GED).
/// Perfect: the noise variance is known (CED, beta -> infinity).
enum class NoiseKnowledge { kEstimated, kPerfect };

/// (P(H0), P(H1)) per sub-band of the layout, reference entry included.
using OccupancyPriors = std::vector<std::pair<double, double>>;

ThroughputParams build_params(const edgedet::SubBandLayout& layout, std::size_t reference_index,
                              const DetectorConfig& config, const OccupancyPriors& priors,
                              NoiseKnowledge knowledge = NoiseKnowledge::kEstimated);

/// Priors set to config.prior_h0 for every sub-band.
OccupancyPriors uniform_priors(const edgedet::SubBandLayout& layout, double prior_h0);

double throughput(double t_o, const ThroughputParams& params);

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

/// Analytic first and second derivatives; requires 0 < t_o < T_f.
Derivatives throughput_derivatives(double t_o, const ThroughputParams& params);

struct SensingOptimum {
  double t_o_s = 0.0;
  bool at_boundary = false;          // no interior sign change of f'
  bool concavity_precondition = true;  // every a_k sqrt(T) + b_k >= 0 at the optimum
};

/// Bisection on f' over [floor_s, T_f (1 - 1e-6)] to 1 us.
SensingOptimum optimal_sensing_time(const ThroughputParams& params, double floor_s);

/// Dense grid argmax of f over [floor_s, T_f), for cross-checking.
double grid_search_optimum(const ThroughputParams& params, double floor_s, double step_s);

}  // namespace wbsense::optimizer
