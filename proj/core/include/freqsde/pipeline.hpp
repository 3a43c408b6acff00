#pragma once

#include <map>
#include <optional>
#include <string>

#include "freqsde/analytic.hpp"
#include "freqsde/ito.hpp"
#include "freqsde/mcs.hpp"
#include "freqsde/metrics.hpp"
#include "freqsde/scenario.hpp"

namespace freqsde {

struct MetricRow {
  std::string metric;
  double time = 0.0;
  std::optional<double> alpha;
  double value = 0.0;
};

// Everything one scenario run produces, before serialization.
struct RunResult {
  Gmm fitted;
  std::optional<Gmm> dsm;
  GeneralizedItoProcess process;
  LinearSdeSystem system;
  AggregatedSfr aggregated;
  FrequencyMixture mixture;
  std::optional<FrequencyMixture> dsm_mixture;
  std::optional<McsResult> mcs;
  std::vector<MetricRow> metrics;
  std::map<std::string, double> stage_seconds;
  std::size_t quantile_count = 0;  // R, 0 for inline-gmm scenarios
};

struct RunOverrides {
  std::optional<std::filesystem::path> output_dir;
  bool disable_mcs = false;
  std::optional<std::uint64_t> seed;  // overrides gmm and mcs seeds
  std::optional<int> threads;
};

// Executes ingest -> fit -> decompose -> build -> solve -> compare.
RunResult run_pipeline(const Scenario& scenario,
                       const RunOverrides& overrides = {});

// Writes all artifact files into `dir` (created if needed). An
// INCOMPLETE marker is present while writing and removed on success.
void write_artifacts(const RunResult& result, const Scenario& scenario,
                     const std::filesystem::path& dir);

// Derives gnuplot-style .dat files from a completed run directory.
void emit_plot_data(const std::filesystem::path& run_dir);

}  // namespace freqsde
