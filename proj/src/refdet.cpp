#include "wbsense/refdet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbsense::refdet {

void RefDetConfig::validate() const {
  if (!(target_quality.value() > 0.5 && target_quality.value() < 1.0)) {
    throw std::invalid_argument("refdet: target quality must lie in (0.5, 1)");
  }
  if (!(design_snr > 0.0)) throw std::invalid_argument("refdet: design snr must be > 0");
}

double tau(const RefDetConfig& config) {
  config.validate();
  // 2P > 1, so erfc_inv is negative; only its square matters.
  const double root = (1.0 + 1.0 / config.design_snr) * mathkit::erfc_inv(2.0 * config.target_quality.value());
  return 2.0 * root * root;
}

double required_tw(const edgedet::SubBandLayout& layout, const RefDetConfig& config) {
  if (layout.count() < 2) throw std::invalid_argument("required_tw: layout needs at least two sub-bands");
  auto widths = layout.widths_hz();
  std::partial_sort(widths.begin(), widths.begin() + 2, widths.end());
  if (!(widths[0] > 0.0)) throw std::invalid_argument("required_tw: degenerate sub-band width");
  return tau(config) * (1.0 / widths[0] + 1.0 / widths[1]);
}

double tw_min(double total_bandwidth_hz, const RefDetConfig& config) {
  if (!(total_bandwidth_hz > 0.0)) throw std::invalid_argument("tw_min: bandwidth must be > 0");
  return 4.0 * tau(config) / total_bandwidth_hz;
}

std::size_t observation_samples(double tw_s, double sample_rate_hz) {
  // Subtract a hair so an exact integer product is not bumped by rounding.
  return static_cast<std::size_t>(std::ceil(tw_s * sample_rate_hz - 1e-6));
}

std::size_t min_energy_band(std::span<const spectral::BandEnergy> energies) {
  if (energies.empty()) throw std::invalid_argument("min_energy_band: no bands");
  std::size_t best = 0;
  for (std::size_t i = 1; i < energies.size(); ++i) {
    if (energies[i].average_energy < energies[best].average_energy) best = i;
  }
  return best;
}

ReferenceSelection select_reference(std::span<const double> psd, const edgedet::SubBandLayout& layout,
                                    double observation_time_s) {
  ReferenceSelection out;
  out.observation_time_s = observation_time_s;
  for (const auto& range : layout.band_bins(psd.size())) {
    out.band_energies.push_back(spectral::band_average_energy(psd, range));
  }
  out.reference_index = min_energy_band(out.band_energies);
  return out;
}

}  // namespace wbsense::refdet
