#include "wbsense/ged.hpp"

#include <cmath>
#include <stdexcept>

namespace wbsense::ged {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

GedStat ged_statistic(const spectral::BandEnergy& target, const spectral::BandEnergy& reference) {
  if (target.bin_count == 0 || reference.bin_count == 0) throw std::invalid_argument("ged_statistic: empty band");
  if (!(reference.average_energy > 0.0)) {
    throw std::domain_error("ged_statistic: reference band has zero energy");
  }
  GedStat out;
  out.n_dk = target.bin_count;
  out.beta = static_cast<double>(reference.bin_count) / static_cast<double>(target.bin_count);
  const double scale = std::sqrt(static_cast<double>(target.bin_count) * out.beta / (out.beta + 1.0));
  out.statistic = scale * (target.average_energy / reference.average_energy - 1.0);
  return out;
}

Probability ged_pf(double lambda) { return Probability::clamped(0.5 * mathkit::erfc(lambda / kSqrt2)); }

double ged_mean(double snr, double n_dk, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("ged: beta must be > 0");
  if (std::isinf(beta)) return std::sqrt(n_dk) * snr;
  return std::sqrt(n_dk * beta / (beta + 1.0)) * snr;
}

Probability ged_pd(double lambda, double snr, double n_dk, double beta) {
  if (!(snr >= 0.0)) throw std::invalid_argument("ged_pd: snr must be >= 0");
  const double mu = ged_mean(snr, n_dk, beta);
  return Probability::clamped(0.5 * mathkit::erfc((lambda - mu) / (kSqrt2 * (1.0 + snr))));
}

double threshold_for_target_pf(Probability target_pf) {
  return kSqrt2 * mathkit::erfc_inv(2.0 * target_pf.value());
}

double threshold_for_target_pd_bins(Probability target_pd, double snr, double n_dk, double beta) {
  if (!(target_pd.value() > 0.0 && target_pd.value() < 1.0)) {
    throw std::invalid_argument("threshold: target pd must lie in (0, 1)");
  }
  if (!(snr > 0.0)) throw std::invalid_argument("threshold: snr must be > 0");
  const double offset = kSqrt2 * (1.0 + snr) * mathkit::erfc_inv(2.0 * target_pd.value());
  return ged_mean(snr, n_dk, beta) + offset;
}

double threshold_for_target_pd(Probability target_pd, double snr, double sense_time_s, double band_hz, double beta) {
  if (!(sense_time_s >= 0.0) || !(band_hz > 0.0)) throw std::invalid_argument("threshold: bad time or bandwidth");
  return threshold_for_target_pd_bins(target_pd, snr, sense_time_s * band_hz, beta);
}

double ced_statistic(const spectral::BandEnergy& target, double true_noise_variance) {
  if (!(true_noise_variance > 0.0)) throw std::invalid_argument("ced_statistic: variance must be > 0");
  return std::sqrt(static_cast<double>(target.bin_count)) * (target.average_energy / true_noise_variance - 1.0);
}

double detection_loss(double snr, double n_dk, double beta, Probability target_pf) {
  const double lambda = threshold_for_target_pf(target_pf);
  const double denom = 1.0 + snr;
  const double ged = mathkit::erfc((lambda - ged_mean(snr, n_dk, beta)) / (kSqrt2 * denom));
  const double ced = mathkit::erfc((lambda - std::sqrt(n_dk) * snr) / (kSqrt2 * denom));
  return 1.0 - ged / ced;
}

std::vector<SensingDecision> classify_energies(std::span<const spectral::BandEnergy> energies,
                                               std::size_t reference_index, std::span<const double> thresholds) {
  if (reference_index >= energies.size()) throw std::out_of_range("classify: reference index out of range");
  if (thresholds.size() != energies.size()) throw std::invalid_argument("classify: one threshold per sub-band");
  std::vector<SensingDecision> out;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    if (k == reference_index) continue;
    const GedStat stat = ged_statistic(energies[k], energies[reference_index]);
    out.push_back({k, stat.statistic < thresholds[k] ? Label::kWhite : Label::kNonWhite, stat.statistic,
                   thresholds[k]});
  }
  return out;
}

std::vector<SensingDecision> classify_subbands(std::span<const double> psd, const edgedet::SubBandLayout& layout,
                                               const refdet::ReferenceSelection& reference,
                                               std::span<const double> thresholds) {
  if (reference.reference_index >= layout.count()) throw std::out_of_range("classify: reference index out of range");
  std::vector<spectral::BandEnergy> energies;
  for (const auto& range : layout.band_bins(psd.size())) energies.push_back(spectral::band_average_energy(psd, range));
  return classify_energies(energies, reference.reference_index, thresholds);
}

}  // namespace wbsense::ged
