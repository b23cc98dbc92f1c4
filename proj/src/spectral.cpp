#include "wbsense/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace wbsense::spectral {

namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex> unitary_dft(std::span<const Complex> in, int sign) {
  const std::size_t n = in.size();
  if (n == 0) return {};
  std::vector<Complex> out(in.begin(), in.end());
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), data, data, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace

std::vector<Complex> forward_dft(std::span<const Complex> time_samples) {
  return unitary_dft(time_samples, FFTW_FORWARD);
}

std::vector<Complex> inverse_dft(std::span<const Complex> spectrum) {
  return unitary_dft(spectrum, FFTW_BACKWARD);
}

std::vector<double> psd(std::span<const Complex> time_samples) {
  if (time_samples.size() < 2) throw std::invalid_argument("psd: need at least 2 samples");
  const auto spectrum = forward_dft(time_samples);
  std::vector<double> out(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) out[k] = std::norm(spectrum[k]);
  return out;
}

std::vector<double> centered_psd(std::span<const Complex> time_samples) {
  const auto natural = psd(time_samples);
  return fft_shift<double>(natural);
}

BandEnergy band_average_energy(std::span<const double> psd, BinRange range) {
  if (range.empty()) throw std::invalid_argument("band_average_energy: empty bin range");
  if (range.end > psd.size()) throw std::out_of_range("band_average_energy: range exceeds psd length");
  const double total = std::accumulate(psd.begin() + static_cast<std::ptrdiff_t>(range.begin),
                                       psd.begin() + static_cast<std::ptrdiff_t>(range.end), 0.0);
  return BandEnergy{range, total / static_cast<double>(range.size()), range.size()};
}

std::size_t freq_to_bin(double f_hz, std::size_t n_bins, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0) || n_bins == 0) throw std::invalid_argument("freq_to_bin: empty axis");
  const double half = 0.5 * bandwidth_hz;
  // Allow a hair of slack for edges computed by accumulation.
  const double slack = 1e-9 * bandwidth_hz;
  if (!(f_hz >= -half - slack && f_hz <= half + slack)) {
    throw std::out_of_range("freq_to_bin: frequency outside [-B/2, B/2]");
  }
  const double delta_f = bandwidth_hz / static_cast<double>(n_bins);
  const double position = std::round((f_hz + half) / delta_f);
  if (position <= 0.0) return 0;
  const auto bin = static_cast<std::size_t>(position);
  return bin > n_bins ? n_bins : bin;
}

double bin_to_freq(std::size_t bin, std::size_t n_bins, double bandwidth_hz) {
  if (n_bins == 0) throw std::invalid_argument("bin_to_freq: empty axis");
  if (bin > n_bins) throw std::out_of_range("bin_to_freq: bin beyond axis");
  return -0.5 * bandwidth_hz + static_cast<double>(bin) * bandwidth_hz / static_cast<double>(n_bins);
}

PrefixEnergy::PrefixEnergy(std::span<const double> psd) : prefix_(psd.size() + 1, 0.0) {
  for (std::size_t i = 0; i < psd.size(); ++i) prefix_[i + 1] = prefix_[i] + psd[i];
}

}  // namespace wbsense::spectral
