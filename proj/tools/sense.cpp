// sense: seeded Monte Carlo campaigns for the wideband sensing chain.
//
//   sense <experiment_id> [--config FILE] [--trials N] [--seed S] [--out DIR]
//         [--threads T] [--check] [--gnuplot] [--set section.key=value ...]
//
// Exit status: 0 success, 2 configuration / output-path error, 3 acceptance
// threshold violated under --check, 1 anything else.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wbsense/harness.hpp"

namespace h = wbsense::harness;

int main(int argc, char** argv) {
  CLI::App app{"Wideband spectrum sensing Monte Carlo campaigns"};
  std::string experiment;
  std::string config_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = "out";
  bool check = false;
  bool gnuplot = false;
  std::vector<std::string> overrides;

  std::string ids;
  for (const auto& id : h::experiment_ids()) ids += (ids.empty() ? "" : ", ") + id;
  app.add_option("experiment", experiment, "one of: " + ids)->required();
  app.add_option("--config", config_path, "sectioned key = value config file");
  app.add_option("--trials", trials, "Monte Carlo trials (or pipeline replicas)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads; results do not depend on this");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--check", check, "exit 3 if an acceptance threshold is violated");
  app.add_flag("--gnuplot", gnuplot, "also write a gnuplot script");
  app.add_option("--set", overrides, "override one key, e.g. --set scenario.snr_db=-18");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    h::ExperimentConfig config = config_path.empty() ? h::ExperimentConfig{} : h::load_config(config_path);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw h::ConfigError("--set expects section.key=value, got '" + item + "'");
      h::apply_setting(config, item.substr(0, eq), item.substr(eq + 1));
    }
    if (trials) {
      if (*trials < 1) throw h::ConfigError("--trials must be >= 1");
      config.trials = *trials;
    }
    if (seed) config.seed = *seed;
    if (threads) config.threads = std::max(1u, *threads);

    const auto result = h::run_experiment(experiment, config);
    try {
      h::write_outputs(result, config, out_dir, gnuplot);
    } catch (const std::runtime_error& e) {
      std::cerr << "sense: " << e.what() << '\n';
      return 2;
    }
    for (const auto& [k, v] : result.summary) std::cout << k << " = " << v << '\n';
    for (const auto& c : result.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    if (check && !result.all_passed()) return 3;
    return 0;
  } catch (const h::ConfigError& e) {
    std::cerr << "sense: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sense: " << e.what() << '\n';
    return 1;
  }
}
