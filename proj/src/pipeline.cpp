#include "wbsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wbsense/optimizer.hpp"
#include "wbsense/refdet.hpp"
#include "wbsense/spectral.hpp"

namespace wbsense::pipeline {

namespace {

refdet::RefDetConfig reference_config(const DetectorConfig& config) {
  return {config.reference_quality, config.reference_snr};
}

}  // namespace

PipelineDesign design_pipeline(const DetectorConfig& config) {
  config.validate();
  PipelineDesign design;
  design.tw_min_s = refdet::tw_min(config.total_bandwidth_hz, reference_config(config));
  design.edge_sense_duration_s = design.tw_min_s;

  edgedet::EdgeScanConfig scan;
  scan.b_min_hz = config.b_min_hz();
  scan.s_max = config.s_max;
  scan.frame_sense_duration_s = design.tw_min_s;
  scan.target_pf = config.edge_target_pf;
  scan.target_pd = config.edge_target_pd;
  scan.design_snr = config.edge_snr;
  scan.convention = config.edge_convention;

  if (config.edge_frames == 0) {
    const auto solved = edgedet::solve_frame_count(scan);
    design.frames = solved.frames;
    design.edge_lambda = solved.lambda;
  } else {
    if (config.edge_frames < 2) throw std::invalid_argument("detector: edge_frames must be >= 2");
    design.frames = config.edge_frames;
    design.edge_lambda =
        mathkit::chi2_quantile(config.edge_target_pf, static_cast<double>(config.edge_frames - 1));
  }

  if (config.edge_use_full_frame) {
    // Use the sensing time of the narrowest admissible layout as the edge observation.
    DetectorConfig probe = config;
    const auto layout = edgedet::SubBandLayout::equal_bands(config.total_bandwidth_hz, config.s_max);
    const auto params = optimizer::build_params(layout, 0, probe, optimizer::uniform_priors(layout, config.prior_h0));
    design.edge_sense_duration_s =
        std::max(design.tw_min_s, optimizer::optimal_sensing_time(params, design.tw_min_s).t_o_s);
  }
  design.edge_samples = sigsynth::samples_in(design.edge_sense_duration_s, config.total_bandwidth_hz);
  design.n_eh = static_cast<std::size_t>(std::floor(0.5 * design.edge_sense_duration_s * config.b_min_hz() + 1e-6));
  const double delta_f = config.total_bandwidth_hz / static_cast<double>(design.edge_samples);
  design.b_min_bins = static_cast<std::size_t>(std::floor(config.b_min_hz() / delta_f + 1e-9));
  return design;
}

SensingPipeline::SensingPipeline(DetectorConfig config)
    : config_(config), design_(design_pipeline(config_)), accumulator_(design_.edge_samples, design_.n_eh) {}

const edgedet::SubBandLayout& SensingPipeline::layout() const {
  if (!layout_) throw std::logic_error("pipeline: layout not learned yet");
  return *layout_;
}

void SensingPipeline::observe_edge_frame(const sigsynth::SpectrumFrame& frame) {
  if (layout_) throw std::logic_error("pipeline: edge layout already learned");
  const std::size_t n = design_.edge_samples;
  if (frame.time_samples.size() >= n && !(frame.time_samples.size() == n && frame.psd_bins.size() == n)) {
    const auto psd = spectral::centered_psd(std::span(frame.time_samples).first(n));
    accumulator_.add_psd(psd);
  } else if (frame.psd_bins.size() == n) {
    accumulator_.add_psd(frame.psd_bins);
  } else {
    throw std::invalid_argument("pipeline: edge frame shorter than the edge observation window");
  }
  if (accumulator_.frames() + 1 == design_.frames) {
    layout_ = edgedet::extract_edges(accumulator_.result(), design_.edge_lambda, design_.b_min_bins,
                                     config_.total_bandwidth_hz);
  }
}

double SensingPipeline::sensing_duration_bound() const {
  const auto& lay = layout();
  const double tw = refdet::required_tw(lay, reference_config(config_));
  const auto priors = optimizer::uniform_priors(lay, config_.prior_h0);
  double bound = tw;
  for (std::size_t i = 0; i < lay.count(); ++i) {
    const auto params = optimizer::build_params(lay, i, config_, priors);
    bound = std::max(bound, optimizer::optimal_sensing_time(params, design_.tw_min_s).t_o_s);
  }
  return bound;
}

FrameReport SensingPipeline::sense_frame(std::size_t frame_index, const FrameGenerator& generator) const {
  const auto& lay = layout();
  const double rate = config_.total_bandwidth_hz;
  FrameReport report;
  report.frame_index = frame_index;
  report.layout = lay;
  report.tw_s = refdet::required_tw(lay, reference_config(config_));

  const double duration = sensing_duration_bound();
  const auto frame = generator(frame_index, duration);
  const std::size_t n_w = refdet::observation_samples(report.tw_s, rate);
  if (frame.time_samples.size() < n_w) throw std::invalid_argument("pipeline: sensed frame shorter than T_w");

  const auto psd_w = spectral::centered_psd(std::span(frame.time_samples).first(n_w));
  const auto selection = refdet::select_reference(psd_w, lay, report.tw_s);
  report.reference_index = selection.reference_index;

  const auto params = optimizer::build_params(lay, report.reference_index, config_,
                                              optimizer::uniform_priors(lay, config_.prior_h0));
  const auto optimum = optimizer::optimal_sensing_time(params, design_.tw_min_s);
  report.optimum_flagged = optimum.at_boundary || !optimum.concavity_precondition;
  report.t_o_s = std::max(optimum.t_o_s, report.tw_s);

  // The T_w samples are the prefix of the T_o window; nothing is counted twice.
  const std::size_t n_s = std::max(sigsynth::samples_in(report.t_o_s, rate), n_w);
  if (frame.time_samples.size() < n_s) throw std::invalid_argument("pipeline: sensed frame shorter than T_o");
  report.samples_consumed = n_s;

  const auto psd_s = spectral::centered_psd(std::span(frame.time_samples).first(n_s));
  std::vector<spectral::BandEnergy> energies;
  for (const auto& range : lay.band_bins(n_s)) energies.push_back(spectral::band_average_energy(psd_s, range));
  const auto& ref = energies[report.reference_index];
  std::vector<double> thresholds(energies.size(), 0.0);
  for (std::size_t k = 0; k < energies.size(); ++k) {
    if (k == report.reference_index) continue;
    const double beta = static_cast<double>(ref.bin_count) / static_cast<double>(energies[k].bin_count);
    thresholds[k] = ged::threshold_for_target_pd_bins(config_.target_pd, config_.target_snr,
                                                      static_cast<double>(energies[k].bin_count), beta);
  }
  report.decisions = ged::classify_energies(energies, report.reference_index, thresholds);

  const double rate_h0 = std::log2(1.0 + config_.cr_snr);
  std::size_t white = 0;
  for (const auto& d : report.decisions) white += d.label == ged::Label::kWhite ? 1 : 0;
  report.realized_throughput_proxy =
      (config_.frame_duration_s - report.t_o_s) / config_.frame_duration_s * static_cast<double>(white) * rate_h0;
  return report;
}

std::vector<FrameReport> run_pipeline(const FrameGenerator& generator, std::size_t total_frames,
                                      const DetectorConfig& config) {
  SensingPipeline pipeline(config);
  const auto& design = pipeline.design();
  if (total_frames < design.frames) {
    throw std::invalid_argument("run_pipeline: need at least L = " + std::to_string(design.frames) + " frames");
  }
  std::vector<FrameReport> reports;
  for (std::size_t f = 0; f < total_frames; ++f) {
    if (!pipeline.layout_ready()) {
      pipeline.observe_edge_frame(generator(f, design.edge_sense_duration_s));
    } else {
      reports.push_back(pipeline.sense_frame(f, generator));
    }
  }
  return reports;
}

FrameGenerator scenario_generator(sigsynth::ScenarioSpec scenario, std::uint64_t seed,
                                  std::optional<double> psd_only_duration_s) {
  return [scenario = std::move(scenario), seed, psd_only_duration_s](std::size_t frame_index, double duration_s) {
    auto spec = scenario;
    spec.frame_duration_s = duration_s;
    Rng rng = make_stream(seed, frame_index);
    if (psd_only_duration_s && std::fabs(*psd_only_duration_s - duration_s) <= 1e-12) {
      sigsynth::SpectrumFrame frame;
      frame.sample_rate_hz = spec.total_bandwidth_hz;
      frame.psd_bins = sigsynth::synthesize_psd(spec, rng, &frame.realized_noise_variance);
      return frame;
    }
    return sigsynth::synthesize_frame(spec, rng);
  };
}

}  // namespace wbsense::pipeline
