#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wbsense/harness.hpp"

using namespace wbsense;
using namespace wbsense::harness;

namespace {

std::string body_of(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  std::string first;
  std::getline(in, first);
  std::stringstream rest;
  rest << in.rdbuf();
  return rest.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wbsense_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "[campaign]\ntrials = 12\nseed = 99\nsampler = psd\n"
      "[scenario]\nsnr_db = -18\nuncertainty_db = 1.5\noccupied = 1,0,0,0,1\n"
      "[detector]\ntarget_pd = 0.95\ncr_snr_db = 10\nedge_mean_convention = published\n"
      "[experiment]\nsnr_db_list = -14, -16\n");
  CHECK(c.trials == 12);
  CHECK(c.seed == 99);
  CHECK(c.sampler == Sampler::kPsd);
  CHECK(c.scenario.snr_db == -18.0);
  CHECK(c.scenario.pattern == Pattern::kCustom);
  CHECK(c.scenario.occupied == std::vector<bool>{true, false, false, false, true});
  CHECK(c.detector.target_pd.value() == doctest::Approx(0.95));
  CHECK(c.detector.cr_snr == doctest::Approx(10.0));
  CHECK(c.detector.edge_convention == edgedet::EdgeMeanConvention::kPublished);
  CHECK(c.params.snr_db_list == std::vector<double>{-14.0, -16.0});
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("[scenario]\nsnr = -20\n").find("scenario.snr") != std::string::npos);
  CHECK(message("[nonsense]\na = 1\n").find("nonsense.a") != std::string::npos);
  CHECK(message("[campaign]\ntrials = 0\n").find("campaign.trials") != std::string::npos);
  CHECK(message("[campaign]\ntrials = many\n").find("campaign.trials") != std::string::npos);
  CHECK(message("[detector]\ntarget_pd = 1.5\n").find("detector.target_pd") != std::string::npos);
  CHECK(message("stray = 1\n").find("stray") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
  CHECK_THROWS_AS(run_experiment("no-such-experiment", ExperimentConfig{}), ConfigError);
}

TEST_CASE("results do not depend on thread count") {
  ExperimentConfig c;
  c.trials = 300;
  c.seed = 5;
  for (const std::string id : {"ged-roc", "ged-uncertainty", "ref-table"}) {
    c.threads = 1;
    const auto a = run_experiment(id, c);
    c.threads = 3;
    const auto b = run_experiment(id, c);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].rows == b.tables[i].rows);
    CHECK(a.summary == b.summary);
  }

  ExperimentConfig e;
  e.trials = 3;
  e.detector.edge_frames = 4;
  e.params.write_run_csv = false;
  e.threads = 1;
  const auto a = run_experiment("edge-hist", e);
  e.threads = 2;
  const auto b = run_experiment("edge-hist", e);
  CHECK(a.table("edge_detections").rows == b.table("edge_detections").rows);
}

TEST_CASE("seed changes the draws") {
  ExperimentConfig c;
  c.trials = 100;
  const auto a = run_experiment("ged-roc", c);
  c.seed = 2;
  const auto b = run_experiment("ged-roc", c);
  CHECK(a.table("ged_trials").rows != b.table("ged_trials").rows);
}

TEST_CASE("written CSV bodies are byte-identical across runs") {
  ExperimentConfig c;
  c.trials = 200;
  const auto d1 = scratch("a");
  const auto d2 = scratch("b");
  write_outputs(run_experiment("ged-uncertainty", c), c, d1, true);
  write_outputs(run_experiment("ged-uncertainty", c), c, d2, false);
  CHECK(body_of(d1 / "ged_uncertainty.csv") == body_of(d2 / "ged_uncertainty.csv"));
  CHECK(std::filesystem::exists(d1 / "ged-uncertainty.gp"));
  CHECK_FALSE(std::filesystem::exists(d2 / "ged-uncertainty.gp"));
  std::ifstream summary(d1 / "summary.txt");
  std::string line;
  std::getline(summary, line);
  CHECK(line.rfind("# wbsense ged-uncertainty", 0) == 0);
  std::getline(summary, line);
  CHECK(line == "experiment = ged-uncertainty");
  std::ifstream csv(d1 / "ged_uncertainty.csv");
  std::getline(csv, line);
  std::getline(csv, line);
  CHECK(line == "kind,detector,target_band,reference_band,beta,snr_db,rate,theory,trials");
}

TEST_CASE("unwritable output path is reported") {
  ExperimentConfig c;
  const auto r = run_experiment("optimal-times", c);
  CHECK_THROWS(write_outputs(r, c, "/proc/wbsense_cannot_write_here", false));
}

TEST_CASE("fast experiments produce their documented tables") {
  ExperimentConfig c;
  const auto opt = run_experiment("optimal-times", c);
  CHECK(opt.all_passed());
  const auto& t = opt.table("optimal_times");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "GED");
  CHECK(t.rows[1][0] == "CED");
  CHECK(std::stod(t.rows[0][1]) == doctest::Approx(50.6).epsilon(0.02));

  const auto sweep = run_experiment("throughput-sweep", c);
  CHECK(sweep.all_passed());
  CHECK(sweep.table("throughput_sweep").columns ==
        std::vector<std::string>{"t_f_s", "detector", "t_o_s", "throughput", "derivative"});

  c.trials = 40;
  const auto ref = run_experiment("ref-table", c);
  CHECK(ref.table("ref_trials").columns ==
        std::vector<std::string>{"snr_db", "trial", "selected_band", "min_energy", "is_white_band"});
  CHECK(ref.table("ref_table").rows.size() == 5);
  const auto roc = run_experiment("ged-roc", c);
  CHECK(roc.table("ged_trials").columns ==
        std::vector<std::string>{"trial", "band", "statistic", "threshold", "label", "truth"});
}

TEST_CASE("full pipeline campaign on a reduced design") {
  ExperimentConfig c;
  c.trials = 3;
  c.detector.edge_snr = 0.1;
  c.detector.reference_snr = 0.1;
  c.detector.target_snr = 0.1;
  c.scenario.snr_db = -3.0;
  const auto r = run_experiment("full-pipeline", c);
  CHECK(r.summary_value("layout_correct_rate") == "1");
  CHECK(r.summary_value("reference_white_rate") == "1");
  CHECK(r.table("pipeline_frames").rows.size() == 3 * 5);
}

TEST_CASE("the sense binary honours its exit codes") {
  const char* bin = std::getenv("SENSE_BIN");
  if (bin == nullptr) return;
  const auto out = scratch("cli");
  const std::string base = std::string(bin) + " optimal-times --out " + out.string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(base.c_str())) == 0);
  CHECK(std::filesystem::exists(out / "optimal_times.csv"));
  const std::string bad = std::string(bin) + " optimal-times --set detector.nope=1 --out " + out.string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
  const std::string unknown = std::string(bin) + " fig-99 --out " + out.string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(unknown.c_str())) == 2);
}
