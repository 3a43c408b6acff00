#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "freqsde/errors.hpp"
#include "freqsde/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

fs::path default_output_root() {
  if (const char* env = std::getenv("FREQSDE_OUT_ROOT")) return env;
  return "runs";
}

int run_command(const std::string& scenario_file,
                const std::string& out_dir, bool no_mcs, long long seed,
                int threads) {
  freqsde::Scenario scenario = freqsde::load_scenario(scenario_file);

  freqsde::RunOverrides overrides;
  overrides.disable_mcs = no_mcs;
  if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) overrides.threads = threads;

  fs::path dir;
  if (!out_dir.empty()) {
    dir = out_dir;
  } else if (scenario.output_dir) {
    dir = *scenario.output_dir;
  } else {
    dir = default_output_root() / fs::path(scenario_file).stem();
  }

  freqsde::RunResult result = freqsde::run_pipeline(scenario, overrides);
  freqsde::write_artifacts(result, scenario, dir);

  std::cout << "run complete: " << dir.string() << "\n";
  for (const auto& [stage, sec] : result.stage_seconds) {
    std::cout << "  " << stage << ": " << sec << " s\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-evolving probability distribution of grid frequency "
               "deviation under stochastic renewable in-feed"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string out_dir;
  bool no_mcs = false;
  long long seed = -1;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Execute a scenario end to end");
  run->add_option("scenario", scenario_file, "Scenario file (JSON)")
      ->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--no-mcs", no_mcs, "Skip the Monte Carlo reference");
  run->add_option("--seed", seed, "Override fitting and simulation seeds");
  run->add_option("--threads", threads, "Worker thread count");

  std::string run_dir;
  auto* plot = app.add_subcommand("plot-data",
                                  "Derive gnuplot data files from a run");
  plot->add_option("run-dir", run_dir, "Completed run directory")
      ->required();

  std::string validate_file;
  auto* validate =
      app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("scenario", validate_file, "Scenario file (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(scenario_file, out_dir, no_mcs, seed, threads);
    }
    if (plot->parsed()) {
      freqsde::emit_plot_data(run_dir);
      std::cout << "plot data written to " << run_dir << "\n";
      return 0;
    }
    if (validate->parsed()) {
      freqsde::load_scenario(validate_file);
      std::cout << validate_file << ": ok\n";
      return 0;
    }
  } catch (const freqsde::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
