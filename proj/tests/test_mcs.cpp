#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freqsde/analytic.hpp"
#include "freqsde/errors.hpp"
#include "freqsde/mcs.hpp"
#include "oracles.hpp"

using namespace freqsde;

namespace {

SfrParams table_params() {
  SfrParams p;
  p.governor_gain_inv = 16.5;
  p.inertia = 4.96;
  p.turbine_coeff = 0.278;
  p.turbine_time = 10.0;
  p.damping = 1.2;
  p.vsg_droop = 0.05;
  p.vsg_inertia = 2.0;
  p.sync_share = 0.7;
  p.vsg_share = 0.3;
  p.nonvsg_share = 0.0;
  return p;
}

LinearSdeSystem table_system(const Gmm& input) {
  auto params = table_params();
  return build_sde_system(aggregate(params), params, from_gmm(input, 1.0));
}

// Scalar OU embedded in the 3-state layout for closed-form checks.
LinearSdeSystem scalar_ou(double mean, double variance) {
  LinearSdeSystem sys;
  sys.state_matrix = -Eigen::Matrix3d::Identity();
  sys.constants.push_back(Eigen::Vector3d(0.0, mean, 0.0));
  sys.diffusions.push_back(
      Eigen::Vector3d(0.0, std::sqrt(2.0 * variance), 0.0));
  sys.initial_state = Eigen::Vector3d(0.0, mean, 0.0);
  sys.weights.push_back(1.0);
  return sys;
}

}  // namespace

TEST_CASE("noise-free paths follow the deterministic solution") {
  Gmm g;
  g.components = {{1.0, 0.12, 0.0}};
  auto params = table_params();
  // Zero variance means zero diffusion; every path is the ODE solution.
  auto sys = build_sde_system(aggregate(params), params, from_gmm(g, 1.0));
  McsConfig cfg;
  cfg.n_paths = 3;
  cfg.dt = 1e-3;
  cfg.t_end = 5.0;
  auto result = simulate(sys, cfg, {5.0});
  Eigen::VectorXd ref = oracles::mean_ode(sys.state_matrix,
                                          sys.constants[0],
                                          sys.initial_state, 5.0);
  for (double v : result.samples[0]) {
    CHECK(std::abs(v - ref(1)) <= 1e-4);
  }
}

TEST_CASE("scalar ou variance is recovered") {
  auto sys = scalar_ou(0.5, 0.04);
  McsConfig cfg;
  cfg.n_paths = 20000;
  cfg.dt = 1e-3;
  cfg.t_end = 5.0;
  cfg.master_seed = 2024;
  auto result = simulate(sys, cfg, {5.0});
  double sd = result.sample_stddev(0);
  double expected = std::sqrt(0.04 * (1.0 - std::exp(-10.0)));
  CHECK(std::abs(sd * sd - expected * expected) / (expected * expected) <
        0.05);
}

TEST_CASE("simulation is reproducible across thread counts") {
  Gmm g;
  g.components = {{0.5, 0.05, 0.0004}, {0.5, 0.2, 0.0009}};
  auto sys = table_system(g);
  McsConfig cfg;
  cfg.n_paths = 500;
  cfg.dt = 1e-2;
  cfg.t_end = 2.0;
  cfg.master_seed = 7;
  cfg.threads = 1;
  auto serial = simulate(sys, cfg, {1.0, 2.0});
  cfg.threads = 4;
  auto parallel = simulate(sys, cfg, {1.0, 2.0});
  CHECK(serial.samples == parallel.samples);
  CHECK(serial.component_of_path == parallel.component_of_path);
}

TEST_CASE("component assignment follows the weights") {
  Gmm g;
  g.components = {{0.3, 0.05, 1e-4}, {0.7, 0.2, 1e-4}};
  auto sys = table_system(g);
  McsConfig cfg;
  cfg.n_paths = 20000;
  cfg.dt = 1e-2;
  cfg.t_end = 0.1;
  cfg.master_seed = 5;
  auto result = simulate(sys, cfg, {0.1});
  double frac0 =
      static_cast<double>(std::count(result.component_of_path.begin(),
                                     result.component_of_path.end(), 0)) /
      static_cast<double>(cfg.n_paths);
  double sigma = std::sqrt(0.3 * 0.7 / static_cast<double>(cfg.n_paths));
  CHECK(std::abs(frac0 - 0.3) < 3.0 * sigma);
}

TEST_CASE("halving dt moves the mean less than the standard error") {
  auto sys = scalar_ou(0.5, 0.04);
  McsConfig cfg;
  cfg.n_paths = 20000;
  cfg.t_end = 5.0;
  cfg.master_seed = 31;
  cfg.dt = 2e-3;
  auto coarse = simulate(sys, cfg, {5.0});
  cfg.dt = 1e-3;
  auto fine = simulate(sys, cfg, {5.0});
  auto mean_of = [](const std::vector<double>& s) {
    double m = 0.0;
    for (double v : s) m += v;
    return m / static_cast<double>(s.size());
  };
  double se = 0.2 / std::sqrt(20000.0);
  CHECK(std::abs(mean_of(coarse.samples[0]) - mean_of(fine.samples[0])) <
        se);
}

TEST_CASE("misaligned capture times are rejected") {
  auto sys = scalar_ou(0.5, 0.04);
  McsConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  try {
    simulate(sys, cfg, {0.50037});
    FAIL("expected MisalignedCaptureTime");
  } catch (const Error& e) {
    CHECK(e.code() == "MisalignedCaptureTime");
  }
  try {
    simulate(sys, cfg, {2.0});
    FAIL("expected MisalignedCaptureTime");
  } catch (const Error& e) {
    CHECK(e.code() == "MisalignedCaptureTime");
  }
}

TEST_CASE("empirical cdf tails and median") {
  auto sys = scalar_ou(0.5, 0.04);
  McsConfig cfg;
  cfg.n_paths = 1001;
  cfg.dt = 1e-2;
  cfg.t_end = 3.0;
  cfg.master_seed = 13;
  auto result = simulate(sys, cfg, {3.0});
  auto sorted = result.samples[0];
  std::sort(sorted.begin(), sorted.end());
  CHECK(empirical_cdf(result, 3.0, sorted.front() - 1.0) == 0.0);
  CHECK(empirical_cdf(result, 3.0, sorted.back() + 1.0) == 1.0);
  double median = sorted[sorted.size() / 2];
  CHECK(std::abs(empirical_cdf(result, 3.0, median) - 0.5) <=
        1.0 / static_cast<double>(cfg.n_paths));
  CHECK_THROWS_AS(empirical_cdf(result, 2.0, 0.0), Error);
}
