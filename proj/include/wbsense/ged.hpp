#pragma once

// Generalized energy detection: each target sub-band's average energy is
// compared against the reference white sub-band's. The statistic is a ratio,
// so a common scale factor on the noise variance cancels exactly.

#include <cstddef>
#include <span>
#include <vector>

#include "wbsense/edgedet.hpp"
#include "wbsense/mathkit.hpp"
#include "wbsense/refdet.hpp"
#include "wbsense/spectral.hpp"

namespace wbsense::ged {

using mathkit::Probability;

struct GedStat {
  double statistic = 0.0;
  double beta = 0.0;  // reference bins / target bins
  std::size_t n_dk = 0;
  double threshold = 0.0;
};

enum class Label { kWhite, kNonWhite };

struct SensingDecision {
  std::size_t subband_index = 0;
  Label label = Label::kWhite;
  double statistic = 0.0;
  double threshold = 0.0;
};

/// sqrt(N_dk beta / (beta + 1)) (M_dk / M_z - 1), beta from bin counts.
GedStat ged_statistic(const spectral::BandEnergy& target, const spectral::BandEnergy& reference);

/// 0.5 erfc(lambda / sqrt 2); independent of beta.
Probability ged_pf(double lambda);

/// Mean of the statistic under occupancy: sqrt(N beta / (beta + 1)) snr.
double ged_mean(double snr, double n_dk, double beta);

/// 0.5 erfc((lambda - mu) / (sqrt 2 (1 + snr))).
Probability ged_pd(double lambda, double snr, double n_dk, double beta);

/// sqrt 2 erfc_inv(2 P_f).
double threshold_for_target_pf(Probability target_pf);

/// a sqrt(T_o) + b with a = sqrt(beta B_k / (beta + 1)) snr and
/// b = sqrt 2 (1 + snr) erfc_inv(2 P_d).
double threshold_for_target_pd(Probability target_pd, double snr, double sense_time_s, double band_hz, double beta);

/// Same threshold with N_dk = T_o B_k supplied directly as a bin count.
double threshold_for_target_pd_bins(Probability target_pd, double snr, double n_dk, double beta);

/// The beta -> infinity limit: sqrt(N_dk) (M_dk / sigma^2 - 1) with the true variance.
double ced_statistic(const spectral::BandEnergy& target, double true_noise_variance);

/// 1 - Pd(beta) / Pd(beta -> inf) at the common threshold for target_pf.
double detection_loss(double snr, double n_dk, double beta, Probability target_pf);

/// One decision per non-reference sub-band. `thresholds` has one entry per
/// sub-band of `layout`; the reference's entry is ignored.
std::vector<SensingDecision> classify_subbands(std::span<const double> psd, const edgedet::SubBandLayout& layout,
                                               const refdet::ReferenceSelection& reference,
                                               std::span<const double> thresholds);

/// Decisions computed from precomputed band energies (same rule).
std::vector<SensingDecision> classify_energies(std::span<const spectral::BandEnergy> energies,
                                               std::size_t reference_index, std::span<const double> thresholds);

}  // namespace wbsense::ged
