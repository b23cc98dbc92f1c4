#pragma once

// Unitary DFT periodograms and band-energy bookkeeping.
//
// Frequency axis: a centered (FFT-shifted) PSD of N bins maps bin m to
// f = -B/2 + m * B/N, so bin 0 is -B/2 and bin N/2 is DC for even N. The
// natural (unshifted) DFT order is the [0, B) view; fft_shift/ifft_shift
// convert between them.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wbsense::spectral {

using Complex = std::complex<double>;

/// Half-open bin interval [begin, end).
struct BinRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] constexpr std::size_t size() const { return end > begin ? end - begin : 0; }
  [[nodiscard]] constexpr bool empty() const { return end <= begin; }
  friend constexpr bool operator==(const BinRange&, const BinRange&) = default;
};

struct BandEnergy {
  BinRange bins;
  double average_energy = 0.0;
  std::size_t bin_count = 0;
};

/// |DFT(x)|^2 with 1/sqrt(N) normalization, natural bin order.
std::vector<double> psd(std::span<const Complex> time_samples);

/// psd() followed by fft_shift: bin 0 is -B/2.
std::vector<double> centered_psd(std::span<const Complex> time_samples);

/// Unitary forward / inverse DFT (natural order).
std::vector<Complex> forward_dft(std::span<const Complex> time_samples);
std::vector<Complex> inverse_dft(std::span<const Complex> spectrum);

/// Natural index of centered bin m (numpy fftshift convention).
constexpr std::size_t centered_to_natural(std::size_t m, std::size_t n) { return (m + n - n / 2) % n; }
constexpr std::size_t natural_to_centered(std::size_t k, std::size_t n) { return (k + n / 2) % n; }

template <typename T>
std::vector<T> fft_shift(std::span<const T> natural) {
  const std::size_t n = natural.size();
  std::vector<T> out(n);
  for (std::size_t k = 0; k < n; ++k) out[natural_to_centered(k, n)] = natural[k];
  return out;
}

template <typename T>
std::vector<T> ifft_shift(std::span<const T> centered) {
  const std::size_t n = centered.size();
  std::vector<T> out(n);
  for (std::size_t m = 0; m < n; ++m) out[centered_to_natural(m, n)] = centered[m];
  return out;
}

/// Arithmetic mean of psd over `range`. Throws on an empty or out-of-bounds range.
BandEnergy band_average_energy(std::span<const double> psd, BinRange range);

/// Nearest centered bin of frequency f in [-B/2, B/2]; f = B/2 maps to N.
std::size_t freq_to_bin(double f_hz, std::size_t n_bins, double bandwidth_hz);

/// Frequency of the lower boundary of centered bin m.
double bin_to_freq(std::size_t bin, std::size_t n_bins, double bandwidth_hz);

/// Running sums for O(1) window means over a fixed PSD.
class PrefixEnergy {
 public:
  explicit PrefixEnergy(std::span<const double> psd);

  [[nodiscard]] double sum(BinRange range) const { return prefix_[range.end] - prefix_[range.begin]; }
  [[nodiscard]] std::size_t size() const { return prefix_.size() - 1; }

 private:
  std::vector<double> prefix_;
};

}  // namespace wbsense::spectral
