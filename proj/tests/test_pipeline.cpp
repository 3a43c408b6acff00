#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "freqsde/errors.hpp"
#include "freqsde/pipeline.hpp"

using namespace freqsde;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("freqsde_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream(p) << body;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kSfrBlock = R"("sfr": {
  "inv_R": 16.5, "H": 4.96, "a": 0.278, "T": 10, "D": 1.2,
  "delta_w": 0.05, "H_w": 2, "K": 0.7, "K1": 0.3, "K2": 0,
  "P_G": 0, "P_L": 0, "f0": 50
})";

std::string minimal_scenario(
    const std::string& mcs_block = R"("mcs": {"enabled": false})") {
  std::ostringstream os;
  os << "{\n"
     << R"("gmm_inline": {"components": [)"
     << R"({"weight": 1.0, "mean": 0.12, "variance": 0.0009}]},)" << "\n"
     << kSfrBlock << ",\n"
     << R"("solver": {"t_end": 5, "dt": 0.5},)" << "\n"
     << mcs_block << "\n}";
  return os.str();
}

}  // namespace

TEST_CASE("scenario parsing reports the missing key") {
  fs::path dir = temp_dir("missing_key");
  std::string body = minimal_scenario();
  body.replace(body.find("\"H\": 4.96, "), 11, "");
  write_file(dir / "scenario.json", body);
  try {
    load_scenario(dir / "scenario.json");
    FAIL("expected MissingKey");
  } catch (const Error& e) {
    CHECK(e.code() == "MissingKey");
    CHECK(std::string(e.what()).find("sfr.H") != std::string::npos);
    CHECK(static_cast<int>(e.category()) == 2);
  }
}

TEST_CASE("scenario requires exactly one input form") {
  fs::path dir = temp_dir("input_form");
  write_file(dir / "both.json",
             R"({"quantile_input": "q.json",
                 "gmm_inline": {"components": []}})");
  CHECK_THROWS_AS(load_scenario(dir / "both.json"), Error);
}

TEST_CASE("gmm records round-trip through serialization") {
  fs::path dir = temp_dir("gmm_roundtrip");
  Gmm model;
  model.components = {{0.25, 0.1, 0.001}, {0.75, 0.3, 0.002}};
  save_gmm(model, dir / "gmm.json");
  Gmm loaded = load_gmm(dir / "gmm.json");
  REQUIRE(loaded.components.size() == 2);
  CHECK(loaded.components[0].weight == 0.25);
  CHECK(loaded.components[1].variance == 0.002);
}

TEST_CASE("quantile input file parses with fixed key names") {
  fs::path dir = temp_dir("quantile_file");
  write_file(dir / "q.json",
             R"({"proportions": [0.1, 0.5, 0.9],
                 "values": [0.2, 0.5, 0.8],
                 "horizon_id": "t+1h"})");
  auto series = load_quantile_series(dir / "q.json");
  CHECK(series.size() == 3);
  CHECK(series.horizon_id() == "t+1h");
}

TEST_CASE("minimal run emits the analytic artifacts") {
  fs::path dir = temp_dir("minimal_run");
  write_file(dir / "scenario.json", minimal_scenario());
  auto scenario = load_scenario(dir / "scenario.json");
  auto result = run_pipeline(scenario);
  write_artifacts(result, scenario, dir / "out");

  CHECK(fs::exists(dir / "out" / "gmm.json"));
  CHECK(fs::exists(dir / "out" / "ito.json"));
  CHECK(fs::exists(dir / "out" / "state_matrix.csv"));
  CHECK(fs::exists(dir / "out" / "mixture_components.csv"));
  CHECK(fs::exists(dir / "out" / "mixture_summary.csv"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(!fs::exists(dir / "out" / "INCOMPLETE"));

  std::string header = read_file(dir / "out" / "mixture_components.csv");
  CHECK(header.rfind("time,component,weight,mean_df,var_df\n", 0) == 0);
  std::string summary = read_file(dir / "out" / "mixture_summary.csv");
  CHECK(summary.rfind("time,mix_mean,mix_std,q05,q50,q95\n", 0) == 0);
}

TEST_CASE("two runs of one scenario are byte-identical") {
  fs::path dir = temp_dir("determinism");
  write_file(dir / "scenario.json",
             minimal_scenario(R"("mcs": {"enabled": true, "n_paths": 200,
                                  "dt": 0.01, "t_end": 2,
                                  "capture_times": [1, 2], "seed": 9})"));
  auto scenario = load_scenario(dir / "scenario.json");
  write_artifacts(run_pipeline(scenario), scenario, dir / "a");
  write_artifacts(run_pipeline(scenario), scenario, dir / "b");
  for (const char* name :
       {"mixture_components.csv", "mixture_summary.csv", "metrics.csv",
        "mcs_t1.csv", "mcs_t2.csv", "state_matrix.csv"}) {
    CHECK(read_file(dir / "a" / name) == read_file(dir / "b" / name));
  }
}

TEST_CASE("dsm baseline runs through the identical pipeline") {
  fs::path dir = temp_dir("dsm");
  std::ostringstream os;
  os << "{\n"
     << R"("gmm_inline": {"components": [)"
     << R"({"weight": 0.5, "mean": 0.05, "variance": 0.0004},)"
     << R"({"weight": 0.5, "mean": 0.35, "variance": 0.0004}]},)" << "\n"
     << kSfrBlock << ",\n"
     << R"("solver": {"t_end": 5, "dt": 0.5},)" << "\n"
     << R"("mcs": {"enabled": true, "n_paths": 2000, "dt": 0.005,
            "t_end": 5, "capture_times": [5], "seed": 3},)"
     << "\n"
     << R"("baseline_dsm": true)" << "\n}";
  write_file(dir / "scenario.json", os.str());
  auto scenario = load_scenario(dir / "scenario.json");
  auto result = run_pipeline(scenario);
  write_artifacts(result, scenario, dir / "out");

  CHECK(fs::exists(dir / "out" / "dsm_gmm.json"));
  CHECK(fs::exists(dir / "out" / "dsm_mixture_components.csv"));

  double w1 = -1.0, dsm_w1 = -1.0;
  for (const auto& row : result.metrics) {
    if (row.metric == "w1") w1 = row.value;
    if (row.metric == "dsm_w1") dsm_w1 = row.value;
  }
  REQUIRE(w1 >= 0.0);
  REQUIRE(dsm_w1 >= 0.0);
  CHECK(w1 < dsm_w1);
}

TEST_CASE("plot-data derives figure files from a completed run") {
  fs::path dir = temp_dir("plot_data");
  write_file(dir / "scenario.json",
             minimal_scenario(R"("mcs": {"enabled": true, "n_paths": 500,
                                  "dt": 0.01, "t_end": 5,
                                  "capture_times": [2.5, 5], "seed": 4})"));
  auto scenario = load_scenario(dir / "scenario.json");
  write_artifacts(run_pipeline(scenario), scenario, dir / "out");
  emit_plot_data(dir / "out");

  CHECK(fs::exists(dir / "out" / "stddev_vs_time.dat"));
  CHECK(fs::exists(dir / "out" / "pdf_t5.dat"));
  CHECK(fs::exists(dir / "out" / "cdf_t5.dat"));
  CHECK(fs::exists(dir / "out" / "pd_t5.dat"));

  // The emitted pdf grid integrates to 1 by the trapezoid rule.
  std::ifstream pdf(dir / "out" / "pdf_t5.dat");
  std::string line;
  std::getline(pdf, line);  // comment header
  std::vector<double> xs, ps;
  double x, p;
  while (pdf >> x >> p) {
    xs.push_back(x);
    ps.push_back(p);
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    integral += 0.5 * (ps[i] + ps[i - 1]) * (xs[i] - xs[i - 1]);
  }
  CHECK(std::abs(integral - 1.0) < 1e-4);
}

TEST_CASE("plot-data without mcs skips comparisons with a note") {
  fs::path dir = temp_dir("plot_data_nomcs");
  write_file(dir / "scenario.json", minimal_scenario());
  auto scenario = load_scenario(dir / "scenario.json");
  write_artifacts(run_pipeline(scenario), scenario, dir / "out");
  emit_plot_data(dir / "out");
  CHECK(fs::exists(dir / "out" / "pdf_t5.dat"));
  CHECK(fs::exists(dir / "out" / "plot_data_notes.txt"));
  CHECK(!fs::exists(dir / "out" / "pd_t5.dat"));
}

TEST_CASE("plot-data refuses an incomplete run") {
  fs::path dir = temp_dir("plot_incomplete");
  fs::create_directories(dir / "out");
  write_file(dir / "out" / "INCOMPLETE", "x");
  CHECK_THROWS_AS(emit_plot_data(dir / "out"), Error);
}
