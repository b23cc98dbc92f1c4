#include "wbsense/config.hpp"

#include <stdexcept>

namespace wbsense {

void DetectorConfig::validate() const {
  if (!(total_bandwidth_hz > 0.0) || s_max < 2) throw std::invalid_argument("detector: need B > 0 and s_max >= 2");
  if (!(frame_duration_s > 0.0)) throw std::invalid_argument("detector: frame duration must be > 0");
  if (!(prior_h0 >= 0.0 && prior_h0 <= 1.0)) throw std::invalid_argument("detector: prior_h0 outside [0, 1]");
  if (!(edge_snr > 0.0 && reference_snr > 0.0 && target_snr > 0.0)) {
    throw std::invalid_argument("detector: design SNRs must be > 0");
  }
  if (!(reference_quality.value() > 0.5 && reference_quality.value() < 1.0)) {
    throw std::invalid_argument("detector: reference quality must lie in (0.5, 1)");
  }
  if (!(target_pd.value() > 0.0 && target_pd.value() < 1.0)) {
    throw std::invalid_argument("detector: target_pd must lie in (0, 1)");
  }
}

}  // namespace wbsense
