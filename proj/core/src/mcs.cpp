#include "freqsde/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "freqsde/errors.hpp"

namespace freqsde {

std::size_t McsResult::capture_index(double t) const {
  for (std::size_t i = 0; i < capture_times.size(); ++i) {
    if (std::abs(capture_times[i] - t) < 1e-9) return i;
  }
  throw Error::config("UnknownCaptureTime",
                      "t=" + std::to_string(t) + " was not captured");
}

double McsResult::sample_stddev(std::size_t capture_idx) const {
  const auto& s = samples.at(capture_idx);
  double mu = 0.0;
  for (double x : s) mu += x;
  mu /= static_cast<double>(s.size());
  double var = 0.0;
  for (double x : s) var += (x - mu) * (x - mu);
  return std::sqrt(var / static_cast<double>(s.size()));
}

McsResult simulate(const LinearSdeSystem& system, const McsConfig& cfg,
                   const std::vector<double>& capture_times) {
  if (cfg.n_paths < 1 || !(cfg.dt > 0.0)) {
    throw Error::config("InvalidMcsConfig", "need n_paths >= 1 and dt > 0");
  }
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));

  // Capture times must sit on the dt grid.
  std::vector<std::size_t> capture_steps;
  for (double t : capture_times) {
    double steps = t / cfg.dt;
    double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-6 || t < 0.0 ||
        rounded > static_cast<double>(n_steps)) {
      throw Error::config("MisalignedCaptureTime",
                          "capture time " + std::to_string(t) +
                              " is not on the dt grid within [0, t_end]");
    }
    capture_steps.push_back(static_cast<std::size_t>(rounded));
  }

  // Cumulative weights for the per-path component draw.
  std::vector<double> cum(system.weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < system.weights.size(); ++i) {
    acc += system.weights[i];
    cum[i] = acc;
  }

  McsResult result;
  result.capture_times = capture_times;
  result.samples.assign(capture_times.size(),
                        std::vector<double>(cfg.n_paths, 0.0));
  result.component_of_path.assign(cfg.n_paths, 0);

  const Eigen::Matrix3d& a = system.state_matrix;
  const double sqrt_dt = std::sqrt(cfg.dt);

  auto run_path = [&](std::size_t path) {
    std::seed_seq seq{cfg.master_seed, static_cast<std::uint64_t>(path)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double u = unif(rng);
    std::size_t comp = 0;
    while (comp + 1 < cum.size() && u > cum[comp]) ++comp;
    result.component_of_path[path] = static_cast<int>(comp);

    const Eigen::Vector3d& c = system.constants[comp];
    const Eigen::Vector3d& b = system.diffusions[comp];

    Eigen::Vector3d x = system.initial_state;
    // Capture steps are given in input order; record any hit at step 0.
    for (std::size_t ci = 0; ci < capture_steps.size(); ++ci) {
      if (capture_steps[ci] == 0) result.samples[ci][path] = x(1);
    }
    for (std::size_t step = 1; step <= n_steps; ++step) {
      double dw = sqrt_dt * gauss(rng);
      x += (a * x + c) * cfg.dt + b * dw;
      if (!x.allFinite()) {
        throw Error::numeric("NonFiniteState",
                             "path " + std::to_string(path) +
                                 " diverged at step " + std::to_string(step));
      }
      for (std::size_t ci = 0; ci < capture_steps.size(); ++ci) {
        if (capture_steps[ci] == step) result.samples[ci][path] = x(1);
      }
    }
  };

  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::max(
                          1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    for (std::size_t p = 0; p < cfg.n_paths; ++p) run_path(p);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    std::size_t per = (cfg.n_paths + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      std::size_t lo = w * per;
      std::size_t hi = std::min<std::size_t>(cfg.n_paths, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t p = lo; p < hi; ++p) run_path(p);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return result;
}

double empirical_cdf(const McsResult& result, double t, double x) {
  const auto& s = result.samples.at(result.capture_index(t));
  std::size_t count = 0;
  for (double v : s) {
    if (v <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(s.size());
}

}  // namespace freqsde
