#pragma once

// Synthetic wideband frames with a piecewise-flat PSD.
//
// Occupied sub-bands carry one unit-modulus QPSK symbol per DFT bin scaled to
// power snr * nominal_noise_variance; every bin also carries ZMCSCG noise of
// the frame's realized variance. Frames are built in the frequency domain and
// inverse transformed, so the PSD bins follow the per-bin model exactly.
//
// Two cheaper samplers draw from the same distribution without the inverse
// transform: synthesize_psd (per-bin periodogram values) and
// sample_band_energies (per-band sums, via the Gamma / Poisson-Gamma laws of
// white and occupied bins). They are not bit-identical to synthesize_frame.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "wbsense/random.hpp"
#include "wbsense/spectral.hpp"

namespace wbsense::sigsynth {

struct ScenarioSpec {
  double total_bandwidth_hz = 0.0;
  std::vector<double> subband_edges_hz;  // S + 1 edges from -B/2 to +B/2
  std::vector<bool> occupied;            // per sub-band
  std::vector<double> snr_linear;        // per sub-band, used when occupied
  double noise_variance = 1.0;           // nominal sigma^2
  double uncertainty_db = 0.0;
  double frame_duration_s = 0.0;
  std::optional<double> b_min_hz;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;

  [[nodiscard]] std::size_t band_count() const { return occupied.size(); }
  [[nodiscard]] double band_width_hz(std::size_t band) const {
    return subband_edges_hz[band + 1] - subband_edges_hz[band];
  }
  /// floor(duration * B), with a 1e-6 sample guard against representation error.
  [[nodiscard]] std::size_t sample_count() const;
  /// Bin partition of each sub-band on an n-bin centered axis.
  [[nodiscard]] std::vector<spectral::BinRange> band_bins(std::size_t n_bins) const;
};

struct SpectrumFrame {
  std::vector<spectral::Complex> time_samples;
  std::vector<double> psd_bins;  // centered
  double sample_rate_hz = 0.0;
  double realized_noise_variance = 0.0;
};

/// Floor-guarded sample count for a duration at a given rate.
std::size_t samples_in(double duration_s, double rate_hz);

/// Uniform on [nominal / eps, nominal * eps] with eps = 10^(uncertainty_db / 10).
double draw_noise_variance(double nominal, double uncertainty_db, Rng& rng);

SpectrumFrame synthesize_frame(const ScenarioSpec& spec, Rng& rng);

/// Centered periodogram of one frame drawn from the per-bin model.
/// `realized_noise_variance`, when given, receives the sigma^2 used.
std::vector<double> synthesize_psd(const ScenarioSpec& spec, Rng& rng,
                                   double* realized_noise_variance = nullptr);

/// Per-band average energies of an n_bins periodogram, drawn directly from
/// their exact distributions. All bands share one noise-variance draw.
std::vector<spectral::BandEnergy> sample_band_energies(const ScenarioSpec& spec, std::size_t n_bins,
                                                       Rng& rng, double* realized_noise_variance = nullptr);

/// The five-band evaluation layout: [-30,-20,-6,4,18,30] MHz, B = 60 MHz.
/// Pattern A occupies SB2 and SB4; pattern B occupies SB1, SB3 and SB5.
enum class FiveBandPattern { kA, kB, kAllWhite };
ScenarioSpec five_band_scenario(FiveBandPattern pattern, double snr_linear, double duration_s,
                                double uncertainty_db = 0.0);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace wbsense::sigsynth
