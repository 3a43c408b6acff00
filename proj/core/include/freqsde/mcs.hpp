#pragma once

#include <cstdint>
#include <vector>

#include "freqsde/sfr.hpp"

namespace freqsde {

struct McsConfig {
  std::size_t n_paths = 20000;
  double dt = 0.001;       // Euler-Maruyama step, s
  double t_end = 15.0;
  std::uint64_t master_seed = 0;
  int threads = 0;         // 0 = hardware concurrency
};

struct McsResult {
  std::vector<double> capture_times;
  // samples[capture][path]: df at the capture time, ordered by path index.
  std::vector<std::vector<double>> samples;
  std::vector<int> component_of_path;

  std::size_t capture_index(double t) const;  // throws UnknownCaptureTime
  double sample_stddev(std::size_t capture_idx) const;
};

// Euler-Maruyama simulation of the mixture SDE. Each path draws its
// component once (probability = component weight), then integrates
// dX = (A X + c_i) dt + B_i dW from x0. Per-path RNG streams derive from
// (master_seed, path index), so results do not depend on thread count.
McsResult simulate(const LinearSdeSystem& system, const McsConfig& cfg,
                   const std::vector<double>& capture_times);

// Right-continuous empirical CDF over the samples captured at t.
double empirical_cdf(const McsResult& result, double t, double x);

}  // namespace freqsde
