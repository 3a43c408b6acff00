#include <benchmark/benchmark.h>

#include <random>

#include "freqsde/analytic.hpp"
#include "freqsde/ito.hpp"
#include "freqsde/mcs.hpp"
#include "freqsde/sfr.hpp"

using namespace freqsde;

namespace {

SfrParams reference_params() {
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

Gmm random_gmm(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  Gmm g;
  for (int i = 0; i < n; ++i) {
    g.components.push_back({1.0 / n, unif(rng), 1e-4 + 1e-3 * unif(rng)});
  }
  return g;
}

LinearSdeSystem reference_system(int n_components) {
  auto params = reference_params();
  return build_sde_system(aggregate(params), params,
                          from_gmm(random_gmm(n_components, 7), 1.0));
}

std::vector<double> time_grid(double t_end, double dt) {
  std::vector<double> g;
  long n = std::lround(t_end / dt);
  for (long i = 0; i <= n; ++i) g.push_back(i * dt);
  return g;
}

}  // namespace

static void BM_SolveMixture(benchmark::State& state) {
  auto sys = reference_system(static_cast<int>(state.range(0)));
  auto grid = time_grid(15.0, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_mixture(sys, grid));
  }
}
BENCHMARK(BM_SolveMixture)->Arg(1)->Arg(3)->Arg(10)->Arg(30);

static void BM_SingleCovariance(benchmark::State& state) {
  auto sys = reference_system(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_covariance(sys, 0, 5.0));
  }
}
BENCHMARK(BM_SingleCovariance);

static void BM_CovarianceQuadrature(benchmark::State& state) {
  auto sys = reference_system(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(covariance_by_quadrature(
        sys.state_matrix, sys.diffusions[0], 5.0));
  }
}
BENCHMARK(BM_CovarianceQuadrature);

static void BM_Simulate(benchmark::State& state) {
  auto sys = reference_system(3);
  McsConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  cfg.dt = 0.001;
  cfg.t_end = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(sys, cfg, {5.0}));
  }
}
BENCHMARK(BM_Simulate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
