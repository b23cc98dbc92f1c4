#pragma once

#include <cstddef>

#include "wbsense/edgedet.hpp"
#include "wbsense/mathkit.hpp"

namespace wbsense {

/// Design parameters shared by every stage of the sensing chain.
/// Defaults are the 10 x 6 MHz TV-band setup at -20 dB.
struct DetectorConfig {
  double total_bandwidth_hz = 60e6;
  std::size_t s_max = 10;

  mathkit::Probability edge_target_pf{0.001};
  mathkit::Probability edge_target_pd{0.999};
  double edge_snr = 0.01;
  edgedet::EdgeMeanConvention edge_convention = edgedet::EdgeMeanConvention::kUnitVariance;
  std::size_t edge_frames = 0;     // 0: solve for L from the targets
  bool edge_use_full_frame = false;  // feed every sensed sample, not only T_wmin

  mathkit::Probability reference_quality{0.999};
  double reference_snr = 0.01;

  mathkit::Probability target_pd{0.9};
  double target_snr = 0.01;

  double frame_duration_s = 2.0;
  double cr_snr = 100.0;
  double prior_h0 = 0.8;

  [[nodiscard]] double b_min_hz() const { return total_bandwidth_hz / static_cast<double>(s_max); }
  void validate() const;
};

}  // namespace wbsense
