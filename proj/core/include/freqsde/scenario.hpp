#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqsde/gmm.hpp"
#include "freqsde/quantile.hpp"
#include "freqsde/sfr.hpp"

namespace freqsde {

struct GmmSettings {
  int n = 10;
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  std::size_t sample_count = 10000;
};

struct SolverSettings {
  double t_start = 0.0;
  double t_end = 15.0;
  double dt = 0.05;
  int threads = 1;

  std::vector<double> grid() const;
};

struct McsSettings {
  bool enabled = true;
  std::size_t n_paths = 20000;
  double dt = 0.001;
  double t_end = 15.0;
  std::uint64_t seed = 0;
  std::vector<double> capture_times = {2.5, 5.0, 10.0};
};

struct MetricsSettings {
  std::vector<double> alphas;  // empty -> default PD grid
  std::vector<double> times;   // empty -> mcs capture times
};

// One experiment of record: exactly one of quantile_input / inline_gmm.
struct Scenario {
  std::optional<std::filesystem::path> quantile_input;
  std::optional<Gmm> inline_gmm;
  std::string horizon_id;  // filled from the quantile file when present
  double p_max = 1.0;
  GmmSettings gmm;
  SfrParams sfr;
  double lambda_w = 1.0;
  std::optional<Eigen::Vector3d> init_override;
  SolverSettings solver;
  McsSettings mcs;
  MetricsSettings metrics;
  bool baseline_dsm = false;
  std::optional<std::filesystem::path> output_dir;
};

// Parses and validates the scenario file. Missing or malformed keys
// raise config errors naming the key.
Scenario load_scenario(const std::filesystem::path& file);

QuantileSeries load_quantile_series(const std::filesystem::path& file);

Gmm load_gmm(const std::filesystem::path& file);
void save_gmm(const Gmm& model, const std::filesystem::path& file);

}  // namespace freqsde
