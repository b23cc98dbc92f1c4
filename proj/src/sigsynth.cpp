#include "wbsense/sigsynth.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace wbsense::sigsynth {

using spectral::BinRange;
using spectral::Complex;

void ScenarioSpec::validate() const {
  if (!(total_bandwidth_hz > 0.0)) throw std::invalid_argument("scenario: total_bandwidth_hz must be > 0");
  if (subband_edges_hz.size() < 3) throw std::invalid_argument("scenario: need at least two sub-bands");
  const std::size_t bands = subband_edges_hz.size() - 1;
  if (occupied.size() != bands || snr_linear.size() != bands) {
    throw std::invalid_argument("scenario: occupancy / snr lists must have one entry per sub-band");
  }
  const double tol = 1e-9 * total_bandwidth_hz;
  if (std::fabs(subband_edges_hz.front() + 0.5 * total_bandwidth_hz) > tol ||
      std::fabs(subband_edges_hz.back() - 0.5 * total_bandwidth_hz) > tol) {
    throw std::invalid_argument("scenario: edges must span [-B/2, B/2]");
  }
  for (std::size_t i = 0; i < bands; ++i) {
    const double width = band_width_hz(i);
    if (!(width > 0.0)) throw std::invalid_argument("scenario: edges must be strictly increasing");
    if (b_min_hz && width < *b_min_hz - tol) {
      throw std::invalid_argument("scenario: sub-band " + std::to_string(i + 1) + " narrower than b_min_hz");
    }
    if (!(snr_linear[i] >= 0.0)) throw std::invalid_argument("scenario: snr must be >= 0");
  }
  if (!(noise_variance > 0.0)) throw std::invalid_argument("scenario: noise_variance must be > 0");
  if (!(uncertainty_db >= 0.0)) throw std::invalid_argument("scenario: uncertainty_db must be >= 0");
  if (!(frame_duration_s > 0.0)) throw std::invalid_argument("scenario: frame_duration_s must be > 0");
}

std::size_t samples_in(double duration_s, double rate_hz) {
  return static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-6));
}

std::size_t ScenarioSpec::sample_count() const { return samples_in(frame_duration_s, total_bandwidth_hz); }

std::vector<BinRange> ScenarioSpec::band_bins(std::size_t n_bins) const {
  std::vector<BinRange> out;
  out.reserve(band_count());
  for (std::size_t i = 0; i + 1 < subband_edges_hz.size(); ++i) {
    out.push_back({spectral::freq_to_bin(subband_edges_hz[i], n_bins, total_bandwidth_hz),
                   spectral::freq_to_bin(subband_edges_hz[i + 1], n_bins, total_bandwidth_hz)});
  }
  return out;
}

double draw_noise_variance(double nominal, double uncertainty_db, Rng& rng) {
  if (!(nominal > 0.0)) throw std::invalid_argument("draw_noise_variance: nominal must be > 0");
  if (!(uncertainty_db >= 0.0)) throw std::invalid_argument("draw_noise_variance: uncertainty must be >= 0");
  if (uncertainty_db == 0.0) return nominal;
  const double eps = db_to_linear(uncertainty_db);
  boost::random::uniform_real_distribution<double> uniform(nominal / eps, nominal * eps);
  return uniform(rng);
}

namespace {

std::vector<BinRange> checked_bins(const ScenarioSpec& spec, std::size_t n) {
  spec.validate();
  if (n < 2) throw std::invalid_argument("scenario: frame shorter than two samples");
  auto bins = spec.band_bins(n);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].empty()) {
      throw std::invalid_argument("scenario: sub-band " + std::to_string(i + 1) + " narrower than one DFT bin");
    }
  }
  return bins;
}

}  // namespace

SpectrumFrame synthesize_frame(const ScenarioSpec& spec, Rng& rng) {
  const std::size_t n = spec.sample_count();
  const auto bins = checked_bins(spec, n);
  const double sigma2 = draw_noise_variance(spec.noise_variance, spec.uncertainty_db, rng);
  const double noise_scale = std::sqrt(0.5 * sigma2);

  boost::random::normal_distribution<double> normal;
  boost::random::uniform_int_distribution<int> quadrant(0, 3);
  static const Complex kQpsk[4] = {{M_SQRT1_2, M_SQRT1_2}, {-M_SQRT1_2, M_SQRT1_2},
                                   {-M_SQRT1_2, -M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}};

  std::vector<Complex> centered(n);
  for (std::size_t band = 0; band < bins.size(); ++band) {
    const bool occupied = spec.occupied[band] && spec.snr_linear[band] > 0.0;
    const double amplitude = occupied ? std::sqrt(spec.snr_linear[band] * spec.noise_variance) : 0.0;
    for (std::size_t m = bins[band].begin; m < bins[band].end; ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      Complex value(noise_scale * re, noise_scale * im);
      if (occupied) value += amplitude * kQpsk[quadrant(rng)];
      centered[m] = value;
    }
  }

  SpectrumFrame frame;
  frame.sample_rate_hz = spec.total_bandwidth_hz;
  frame.realized_noise_variance = sigma2;
  frame.psd_bins.resize(n);
  for (std::size_t m = 0; m < n; ++m) frame.psd_bins[m] = std::norm(centered[m]);
  frame.time_samples = spectral::inverse_dft(spectral::ifft_shift<Complex>(centered));
  return frame;
}

std::vector<double> synthesize_psd(const ScenarioSpec& spec, Rng& rng, double* realized_noise_variance) {
  const std::size_t n = spec.sample_count();
  const auto bins = checked_bins(spec, n);
  const double sigma2 = draw_noise_variance(spec.noise_variance, spec.uncertainty_db, rng);
  if (realized_noise_variance != nullptr) *realized_noise_variance = sigma2;

  boost::random::exponential_distribution<double> exponential;
  boost::random::normal_distribution<double> normal;
  const double noise_scale = std::sqrt(0.5 * sigma2);

  std::vector<double> out(n);
  for (std::size_t band = 0; band < bins.size(); ++band) {
    const bool occupied = spec.occupied[band] && spec.snr_linear[band] > 0.0;
    if (!occupied) {
      for (std::size_t m = bins[band].begin; m < bins[band].end; ++m) out[m] = sigma2 * exponential(rng);
      continue;
    }
    // Noise is circular, so the symbol phase does not affect |s + w|^2.
    const double amplitude = std::sqrt(spec.snr_linear[band] * spec.noise_variance);
    for (std::size_t m = bins[band].begin; m < bins[band].end; ++m) {
      const double re = amplitude + noise_scale * normal(rng);
      const double im = noise_scale * normal(rng);
      out[m] = re * re + im * im;
    }
  }
  return out;
}

std::vector<spectral::BandEnergy> sample_band_energies(const ScenarioSpec& spec, std::size_t n_bins, Rng& rng,
                                                       double* realized_noise_variance) {
  const auto bins = checked_bins(spec, n_bins);
  const double sigma2 = draw_noise_variance(spec.noise_variance, spec.uncertainty_db, rng);
  if (realized_noise_variance != nullptr) *realized_noise_variance = sigma2;

  std::vector<spectral::BandEnergy> out;
  out.reserve(bins.size());
  for (std::size_t band = 0; band < bins.size(); ++band) {
    const auto count = static_cast<double>(bins[band].size());
    double shape = count;
    if (spec.occupied[band] && spec.snr_linear[band] > 0.0) {
      // sum |A + w|^2 over n bins = (sigma^2 / 2) chi'^2(2n, 2n A^2 / sigma^2),
      // a Poisson(n A^2 / sigma^2) mixture of sigma^2 Gamma(n + K).
      const double noncentral = count * spec.snr_linear[band] * spec.noise_variance / sigma2;
      boost::random::poisson_distribution<long long, double> poisson(noncentral);
      shape += static_cast<double>(poisson(rng));
    }
    boost::random::gamma_distribution<double> gamma(shape, 1.0);
    const double total = sigma2 * gamma(rng);
    out.push_back({bins[band], total / count, bins[band].size()});
  }
  return out;
}

ScenarioSpec five_band_scenario(FiveBandPattern pattern, double snr_linear, double duration_s,
                                double uncertainty_db) {
  ScenarioSpec spec;
  spec.total_bandwidth_hz = 60e6;
  spec.subband_edges_hz = {-30e6, -20e6, -6e6, 4e6, 18e6, 30e6};
  switch (pattern) {
    case FiveBandPattern::kA: spec.occupied = {false, true, false, true, false}; break;
    case FiveBandPattern::kB: spec.occupied = {true, false, true, false, true}; break;
    case FiveBandPattern::kAllWhite: spec.occupied = {false, false, false, false, false}; break;
  }
  spec.snr_linear.assign(5, snr_linear);
  spec.noise_variance = 1.0;
  spec.uncertainty_db = uncertainty_db;
  spec.frame_duration_s = duration_s;
  spec.b_min_hz = 6e6;
  return spec;
}

}  // namespace wbsense::sigsynth
