#pragma once

// Seeded Monte Carlo campaigns behind the `sense` tool.
//
// Every trial draws from its own stream make_stream(seed', trial) where seed'
// depends only on the master seed and the sweep point, so results do not
// depend on thread count or scheduling. Aggregation runs in trial order after
// all workers finish.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbsense/config.hpp"
#include "wbsense/sigsynth.hpp"

namespace wbsense::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How band energies are drawn in Monte Carlo trials.
///   bands: exact per-band Gamma / Poisson-Gamma sums (fastest)
///   psd:   per-bin periodogram values
///   frame: full time-domain frame and FFT
enum class Sampler { kBands, kPsd, kFrame };

/// Occupancy of the five-band scenario per trial. Alternate switches between
/// patterns A and B on even / odd trials.
enum class Pattern { kA, kB, kAlternate, kAllWhite, kCustom };

struct ScenarioSettings {
  double total_bandwidth_hz = 60e6;
  std::vector<double> subband_edges_hz{-30e6, -20e6, -6e6, 4e6, 18e6, 30e6};
  Pattern pattern = Pattern::kAlternate;
  std::vector<bool> occupied;  // used by kCustom
  double snr_db = -20.0;
  double noise_variance = 1.0;
  double uncertainty_db = 0.0;

  /// Scenario for one trial; duration is filled by the caller.
  [[nodiscard]] sigsynth::ScenarioSpec for_trial(std::size_t trial, double duration_s) const;
  [[nodiscard]] std::size_t band_count() const { return subband_edges_hz.size() - 1; }
};

struct ExperimentParams {
  std::vector<double> snr_db_list;          // ref-table, ged-uncertainty
  double sense_time_s = 0.013;              // ged-roc, ged-uncertainty
  double target_pf = 0.1;                   // ged-roc, ged-uncertainty
  std::size_t reference_band = 3;           // 1-based, ged-roc
  std::size_t white_band = 1;               // 1-based, ged-roc
  std::size_t occupied_band = 2;            // 1-based, ged-roc and ged-uncertainty
  double uncertainty_db = 2.0;              // ged-uncertainty
  std::vector<double> frame_durations_s{0.1, 1.2, 2.0};  // throughput-sweep
  double sweep_step_s = 5e-4;               // throughput-sweep
  double grid_step_s = 1e-4;                // optimal-times, throughput-sweep cross-check
  std::size_t sensed_frames = 1;            // full-pipeline, per replica
  std::size_t h0_position_trials = 0;       // edge-hist H0 calibration
  std::size_t h0_n_eh = 0;                  // 0: the design half window
  bool write_run_csv = true;                // edge-hist first-trial statistic dump
};

struct ExperimentConfig {
  std::size_t trials = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  Sampler sampler = Sampler::kBands;
  ScenarioSettings scenario;
  DetectorConfig detector;
  ExperimentParams params;
};

/// Parses a sectioned key = value file. Unknown sections or keys and
/// unparsable values raise ConfigError naming the key.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
/// Applies one `section.key = value` assignment.
void apply_setting(ExperimentConfig& config, const std::string& dotted_key, const std::string& value);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CampaignResult {
  std::string experiment;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<Check> checks;
  std::string gnuplot;

  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] const Table& table(const std::string& name) const;
  [[nodiscard]] std::string summary_value(const std::string& key) const;
};

const std::vector<std::string>& experiment_ids();

/// Runs one experiment. Throws ConfigError for an unknown id or invalid settings.
CampaignResult run_experiment(const std::string& experiment_id, const ExperimentConfig& config);

/// Writes <dir>/<table>.csv, <dir>/summary.txt and optionally <dir>/<experiment>.gp.
/// Each CSV begins with one '#' line carrying the timestamp; the body after it is deterministic.
void write_outputs(const CampaignResult& result, const ExperimentConfig& config, const std::filesystem::path& dir,
                   bool with_gnuplot);

/// Calls fn(i) for i in [0, n) on `threads` workers; rethrows the first exception.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Compact round-trippable number formatting used in every CSV.
std::string format_number(double value);

}  // namespace wbsense::harness
