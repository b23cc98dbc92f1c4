#pragma once

// End-to-end sensing over a frame sequence: edges from the first L - 1
// frames, then per frame reference isolation, sensing-time optimization and
// generalized energy detection of every other sub-band.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wbsense/config.hpp"
#include "wbsense/edgedet.hpp"
#include "wbsense/ged.hpp"
#include "wbsense/sigsynth.hpp"

namespace wbsense::pipeline {

/// Design-time quantities derived once per configuration.
struct PipelineDesign {
  double tw_min_s = 0.0;
  double edge_sense_duration_s = 0.0;  // T_te
  std::size_t edge_samples = 0;        // N_e = floor(T_te B)
  std::size_t n_eh = 0;
  std::size_t frames = 0;  // L
  double edge_lambda = 0.0;
  std::size_t b_min_bins = 0;  // on the N_e-bin axis
};

struct FrameReport {
  std::size_t frame_index = 0;
  edgedet::SubBandLayout layout;
  std::size_t reference_index = 0;
  double tw_s = 0.0;
  double t_o_s = 0.0;
  std::vector<ged::SensingDecision> decisions;
  double realized_throughput_proxy = 0.0;
  std::size_t samples_consumed = 0;
  bool optimum_flagged = false;  // boundary optimum or concavity precondition violated
};

/// Produces frame `frame_index` observed for `duration_s`. Edge-learning
/// frames may carry only psd_bins (exactly floor(duration * B) bins); sensed
/// frames must carry time samples.
using FrameGenerator = std::function<sigsynth::SpectrumFrame(std::size_t frame_index, double duration_s)>;

PipelineDesign design_pipeline(const DetectorConfig& config);

class SensingPipeline {
 public:
  explicit SensingPipeline(DetectorConfig config);

  [[nodiscard]] const PipelineDesign& design() const { return design_; }
  [[nodiscard]] const DetectorConfig& config() const { return config_; }
  [[nodiscard]] bool layout_ready() const { return layout_.has_value(); }
  [[nodiscard]] const edgedet::SubBandLayout& layout() const;
  [[nodiscard]] const edgedet::EdgeStatVector& edge_stats() const { return accumulator_.result(); }

  /// Feeds one of the L - 1 edge-learning frames; extracts the layout after the last.
  void observe_edge_frame(const sigsynth::SpectrumFrame& frame);

  /// Longest sensing time any reference choice could need for the current layout.
  [[nodiscard]] double sensing_duration_bound() const;

  /// Full decision for one frame drawn from `generator`.
  FrameReport sense_frame(std::size_t frame_index, const FrameGenerator& generator) const;

 private:
  DetectorConfig config_;
  PipelineDesign design_;
  edgedet::EdgeAccumulator accumulator_;
  std::optional<edgedet::SubBandLayout> layout_;
};

/// Runs `total_frames` frames: L - 1 edge frames then total_frames - L + 1 sensed frames.
std::vector<FrameReport> run_pipeline(const FrameGenerator& generator, std::size_t total_frames,
                                      const DetectorConfig& config);

/// Generator drawing frame i of `scenario` from stream (seed, i). Edge frames
/// of exactly `psd_only_duration_s` use the per-bin PSD sampler.
FrameGenerator scenario_generator(sigsynth::ScenarioSpec scenario, std::uint64_t seed,
                                  std::optional<double> psd_only_duration_s = std::nullopt);

}  // namespace wbsense::pipeline
