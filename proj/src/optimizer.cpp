#include "wbsense/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace wbsense::optimizer {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_interior(double t_o, const ThroughputParams& params) {
  if (!(t_o > 0.0 && t_o < params.frame_duration_s)) {
    throw std::domain_error("throughput_derivatives: t_o must lie strictly inside (0, T_f)");
  }
}

}  // namespace

OccupancyPriors uniform_priors(const edgedet::SubBandLayout& layout, double prior_h0) {
  return OccupancyPriors(layout.count(), {prior_h0, 1.0 - prior_h0});
}

ThroughputParams build_params(const edgedet::SubBandLayout& layout, std::size_t reference_index,
                              const DetectorConfig& config, const OccupancyPriors& priors,
                              NoiseKnowledge knowledge) {
  if (reference_index >= layout.count()) throw std::out_of_range("build_params: reference index invalid");
  if (priors.size() != layout.count()) throw std::invalid_argument("build_params: one prior pair per sub-band");

  ThroughputParams params;
  params.frame_duration_s = config.frame_duration_s;
  params.cr_snr = config.cr_snr;
  params.target_pd = config.target_pd;

  const double snr = config.target_snr;
  // The primary SNR seen at the CR receiver is taken equal to the sensing SNR.
  const double rate_h0 = std::log2(1.0 + config.cr_snr);
  const double rate_h1 = std::log2(1.0 + config.cr_snr / (1.0 + snr));
  const double b = kSqrt2 * (1.0 + snr) * mathkit::erfc_inv(2.0 * config.target_pd.value());
  const double ref_width = layout.width_hz(reference_index);

  for (std::size_t k = 0; k < layout.count(); ++k) {
    if (k == reference_index) continue;
    const auto [p0, p1] = priors[k];
    if (!(p0 >= 0.0 && p1 >= 0.0) || std::fabs(p0 + p1 - 1.0) > 1e-9) {
      throw std::invalid_argument("build_params: priors must be probabilities summing to 1");
    }
    const double width = layout.width_hz(k);
    const double beta = ref_width / width;
    BandCoefficients c;
    c.subband_index = k;
    c.a = knowledge == NoiseKnowledge::kPerfect ? std::sqrt(width) * snr
                                                 : std::sqrt(beta * width / (beta + 1.0)) * snr;
    c.b = b;
    c.psi = 0.5 * p0 * rate_h0;
    c.psi_tilde = c.psi + p1 * rate_h1 * (1.0 - config.target_pd.value());
    params.bands.push_back(c);
    params.p_h0.push_back(p0);
    params.p_h1.push_back(p1);
  }
  return params;
}

double throughput(double t_o, const ThroughputParams& params) {
  const double tf = params.frame_duration_s;
  if (!(t_o >= 0.0 && t_o <= tf)) throw std::domain_error("throughput: t_o outside [0, T_f]");
  double sum = 0.0;
  const double root = std::sqrt(t_o);
  for (const auto& band : params.bands) sum += band.psi * std::erf((band.a * root + band.b) / kSqrt2) + band.psi_tilde;
  return (tf - t_o) / tf * sum;
}

Derivatives throughput_derivatives(double t_o, const ThroughputParams& params) {
  check_interior(t_o, params);
  const double tf = params.frame_duration_s;
  const double root = std::sqrt(t_o);
  const double remaining = 1.0 - t_o / tf;
  Derivatives d;
  for (const auto& band : params.bands) {
    const double u = band.a * root + band.b;
    const double g = band.a / std::sqrt(2.0 * M_PI * t_o) * std::exp(-0.5 * u * u);
    d.first += band.psi * (g * remaining - std::erf(u / kSqrt2) / tf) - band.psi_tilde / tf;
    d.second -= band.psi * g * (2.0 / tf + (band.a * u / (2.0 * root) + 0.5 / t_o) * remaining);
  }
  return d;
}

SensingOptimum optimal_sensing_time(const ThroughputParams& params, double floor_s) {
  const double tf = params.frame_duration_s;
  if (params.bands.empty()) throw std::invalid_argument("optimal_sensing_time: no target sub-bands");
  double lo = floor_s > 0.0 ? floor_s : 1e-9 * tf;
  double hi = tf * (1.0 - 1e-6);
  if (!(lo < hi)) throw std::invalid_argument("optimal_sensing_time: floor is not below the frame duration");

  SensingOptimum out;
  if (throughput_derivatives(lo, params).first <= 0.0) {
    out.t_o_s = lo;
    out.at_boundary = true;
  } else if (throughput_derivatives(hi, params).first >= 0.0) {
    out.t_o_s = hi;
    out.at_boundary = true;
  } else {
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      if (throughput_derivatives(mid, params).first > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.t_o_s = 0.5 * (lo + hi);
  }
  const double root = std::sqrt(out.t_o_s);
  for (const auto& band : params.bands) {
    if (band.a * root + band.b < 0.0) out.concavity_precondition = false;
  }
  return out;
}

double grid_search_optimum(const ThroughputParams& params, double floor_s, double step_s) {
  if (!(step_s > 0.0)) throw std::invalid_argument("grid_search_optimum: step must be > 0");
  double best_t = floor_s;
  double best_f = throughput(floor_s, params);
  for (double t = floor_s + step_s; t < params.frame_duration_s; t += step_s) {
    const double f = throughput(t, params);
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace wbsense::optimizer
