#pragma once

// Reference white sub-band isolation: observation time and min-energy choice.

#include <cstddef>
#include <span>
#include <vector>

#include "wbsense/edgedet.hpp"
#include "wbsense/mathkit.hpp"
#include "wbsense/spectral.hpp"

namespace wbsense::refdet {

struct RefDetConfig {
  mathkit::Probability target_quality{0.999};  // pairwise Pr(AE(occupied) >= AE(reference))
  double design_snr = 0.0;                     // linear

  void validate() const;
};

struct ReferenceSelection {
  std::size_t reference_index = 0;
  std::vector<spectral::BandEnergy> band_energies;
  double observation_time_s = 0.0;
};

/// tau = 2 ((1 + 1/snr) erfc_inv(2 P))^2, in units of seconds * Hz.
double tau(const RefDetConfig& config);

/// T_w = tau (1/B1 + 1/B2) over the two narrowest sub-bands.
double required_tw(const edgedet::SubBandLayout& layout, const RefDetConfig& config);

/// 4 tau / B: required_tw for two equal halves.
double tw_min(double total_bandwidth_hz, const RefDetConfig& config);

/// ceil(T_w * B): the sample budget never undershoots the target.
std::size_t observation_samples(double tw_s, double sample_rate_hz);

/// Band with the least average energy (lowest index on ties).
ReferenceSelection select_reference(std::span<const double> psd, const edgedet::SubBandLayout& layout,
                                    double observation_time_s = 0.0);

/// Same rule applied to precomputed band energies.
std::size_t min_energy_band(std::span<const spectral::BandEnergy> energies);

}  // namespace wbsense::refdet
