#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "freqsde/analytic.hpp"
#include "freqsde/errors.hpp"
#include "freqsde/linalg.hpp"
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

Gmm three_component_input() {
  Gmm g;
  g.components = {{0.3, 0.05, 0.0004},
                  {0.4, 0.12, 0.0009},
                  {0.3, 0.2, 0.0004}};
  return g;
}

// Stand-alone stable random system for formula cross-checks.
LinearSdeSystem random_stable_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::Matrix3d a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = unif(rng);
  }
  Eigen::EigenSolver<Eigen::Matrix3d> es(a);
  double max_re = es.eigenvalues().real().maxCoeff();
  a -= (max_re + 0.5) * Eigen::Matrix3d::Identity();

  LinearSdeSystem sys;
  sys.state_matrix = a;
  Eigen::Vector3d b(unif(rng), unif(rng), unif(rng));
  sys.diffusions.push_back(b);
  sys.constants.push_back(
      Eigen::Vector3d(unif(rng), unif(rng), unif(rng)));
  sys.initial_state = Eigen::Vector3d(unif(rng), unif(rng), unif(rng));
  sys.weights.push_back(1.0);
  return sys;
}

}  // namespace

TEST_CASE("expm of the zero matrix is the identity") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
  CHECK((expm(z) - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("expm of a diagonal matrix") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = -2.0;
  Eigen::MatrixXd e = expm(d);
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(e(0, 1) == 0.0);
}

TEST_CASE("expm matches the taylor oracle on the reference system") {
  auto sys = table_system(three_component_input());
  Eigen::MatrixXd at = sys.state_matrix * 0.5;
  CHECK((expm(at) - oracles::expm_taylor(at)).norm() < 1e-10);
}

TEST_CASE("expm rejects non-finite input") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expm(m), Error);
}

TEST_CASE("expm matches eigendecomposition reconstruction") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    auto sys = random_stable_system(rng);
    Eigen::MatrixXd at = sys.state_matrix * 1.3;
    auto work = build_eigenwork(at / 1.3);
    Eigen::Matrix3cd rec = Eigen::Matrix3cd::Zero();
    for (int k = 0; k < 3; ++k) {
      rec += std::exp(work.eigenvalues(k) * 1.3) *
             (work.eigenvectors.col(k) *
              work.eigenvectors_inv.row(k));
    }
    CHECK((expm(at) - rec.real()).norm() / rec.norm() < 1e-12);
  }
}

TEST_CASE("solve_mean boundary behavior") {
  auto sys = table_system(three_component_input());
  for (std::size_t i = 0; i < sys.component_count(); ++i) {
    CHECK((solve_mean(sys, i, 0.0) - sys.initial_state).norm() < 1e-14);
    Eigen::Vector3d limit =
        -sys.state_matrix.partialPivLu().solve(sys.constants[i]);
    CHECK((solve_mean(sys, i, 100.0) - limit).norm() < 1e-8);
  }
}

TEST_CASE("solve_mean matches the ode oracle") {
  auto sys = table_system(three_component_input());
  for (double t : {0.5, 2.0, 5.0, 10.0, 15.0}) {
    for (std::size_t i = 0; i < sys.component_count(); ++i) {
      Eigen::VectorXd ref = oracles::mean_ode(
          sys.state_matrix, sys.constants[i], sys.initial_state, t);
      CHECK((solve_mean(sys, i, t) - ref).norm() < 1e-8);
    }
  }
}

TEST_CASE("covariance is zero at t=0") {
  auto sys = table_system(three_component_input());
  CHECK(solve_covariance(sys, 0, 0.0).norm() == 0.0);
}

TEST_CASE("scalar reduction reproduces the ou variance law") {
  // Diagonal system embedding a scalar OU with A=-1, B=sqrt(2 sigma^2).
  const double var = 0.04;
  LinearSdeSystem sys;
  sys.state_matrix = -Eigen::Matrix3d::Identity();
  sys.constants.push_back(Eigen::Vector3d::Zero());
  sys.diffusions.push_back(Eigen::Vector3d(0.0, 0.0, std::sqrt(2.0 * var)));
  sys.initial_state.setZero();
  sys.weights.push_back(1.0);
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    double expected = var * (1.0 - std::exp(-2.0 * t));
    CHECK(std::abs(solve_covariance(sys, 0, t)(2, 2) - expected) < 1e-12);
  }
  CHECK(solve_covariance(sys, 0, 1.0)(2, 2) ==
        doctest::Approx(0.04 * (1.0 - std::exp(-2.0))).epsilon(1e-12));
}

TEST_CASE("eigen covariance matches the lyapunov oracle") {
  auto sys = table_system(three_component_input());
  for (std::size_t i = 0; i < sys.component_count(); ++i) {
    Eigen::MatrixXd ref = oracles::covariance_lyapunov(
        sys.state_matrix, sys.diffusions[i], 5.0);
    CHECK((solve_covariance(sys, i, 5.0) - ref).norm() < 1e-8);
  }

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto rsys = random_stable_system(rng);
    Eigen::MatrixXd ref = oracles::covariance_lyapunov(
        rsys.state_matrix, rsys.diffusions[0], 2.0);
    CHECK((solve_covariance(rsys, 0, 2.0) - ref).norm() < 1e-8);
  }
}

TEST_CASE("quadrature fallback agrees with the eigen formula") {
  auto sys = table_system(three_component_input());
  Eigen::MatrixXd quad = covariance_by_quadrature(
      sys.state_matrix, sys.diffusions[0], 5.0);
  CHECK((solve_covariance(sys, 0, 5.0) - quad).norm() < 1e-8);
}

TEST_CASE("mixture reduces correctly for one component") {
  Gmm g;
  g.components = {{1.0, 0.12, 0.0009}};
  auto sys = table_system(g);
  auto mix = solve_mixture(sys, {0.0, 1.0, 5.0});
  REQUIRE(mix.weights.size() == 1);
  for (double t : {0.0, 1.0, 5.0}) {
    std::size_t ti = mix.time_index(t);
    CHECK(mix.means[ti][0] == doctest::Approx(solve_mean(sys, 0, t)(1)));
    CHECK(mix.vars[ti][0] ==
          doctest::Approx(solve_covariance(sys, 0, t)(1, 1)));
  }
}

TEST_CASE("duplicate components collapse to one gaussian") {
  Gmm dup;
  dup.components = {{0.5, 0.12, 0.0009}, {0.5, 0.12, 0.0009}};
  Gmm single;
  single.components = {{1.0, 0.12, 0.0009}};
  auto mix2 = solve_mixture(table_system(dup), {5.0});
  auto mix1 = solve_mixture(table_system(single), {5.0});
  for (int i = -5; i <= 5; ++i) {
    double x = 0.002 * i;
    CHECK(mixture_pdf(mix2, 5.0, x) ==
          doctest::Approx(mixture_pdf(mix1, 5.0, x)));
  }
}

TEST_CASE("weights pass through unchanged") {
  auto input = three_component_input();
  auto mix = solve_mixture(table_system(input), {0.5, 5.0, 15.0});
  for (std::size_t i = 0; i < input.components.size(); ++i) {
    CHECK(mix.weights[i] == input.components[i].weight);
  }
}

TEST_CASE("equal input variances give equal output variances") {
  Gmm g;
  g.components = {{0.3, 0.05, 0.0004}, {0.3, 0.12, 0.0004},
                  {0.4, 0.2, 0.0004}};
  auto mix = solve_mixture(table_system(g), {2.0, 8.0});
  for (std::size_t ti = 0; ti < mix.times.size(); ++ti) {
    CHECK(mix.vars[ti][0] == doctest::Approx(mix.vars[ti][1]));
    CHECK(mix.vars[ti][1] == doctest::Approx(mix.vars[ti][2]));
  }
}

TEST_CASE("mixture stddev settles at long horizons") {
  // Widely separated component means keep the slow turbine mode visible
  // far past t=10; the settling check uses a tighter forecast mixture.
  Gmm g;
  g.components = {{0.3, 0.11, 0.0004},
                  {0.4, 0.12, 0.0009},
                  {0.3, 0.13, 0.0004}};
  std::vector<double> grid;
  for (double t = 0.0; t <= 20.0 + 1e-9; t += 0.5) grid.push_back(t);
  auto mix = solve_mixture(table_system(g), grid);
  double s10 = mix.mixture_stddev(mix.time_index(10.0));
  double s15 = mix.mixture_stddev(mix.time_index(15.0));
  double s20 = mix.mixture_stddev(mix.time_index(20.0));
  CHECK(std::abs(s15 - s10) / s10 < 0.01);
  CHECK(std::abs(s20 - s15) / s15 < 0.01);
}

TEST_CASE("solve_mixture is identical across thread counts") {
  std::vector<double> grid;
  for (double t = 0.0; t <= 10.0 + 1e-9; t += 0.1) grid.push_back(t);
  auto sys = table_system(three_component_input());
  SolverOptions serial;
  serial.threads = 1;
  SolverOptions parallel;
  parallel.threads = 4;
  auto a = solve_mixture(sys, grid, serial);
  auto b = solve_mixture(sys, grid, parallel);
  for (std::size_t ti = 0; ti < grid.size(); ++ti) {
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
      CHECK(a.means[ti][i] == b.means[ti][i]);
      CHECK(a.vars[ti][i] == b.vars[ti][i]);
    }
  }
}

TEST_CASE("mixture evaluators") {
  Gmm g;
  g.components = {{1.0, 0.12, 0.0009}};
  auto mix = solve_mixture(table_system(g), {5.0});

  double median = mixture_quantile(mix, 5.0, 0.5);
  CHECK(median == doctest::Approx(mix.means[0][0]).epsilon(1e-9));

  auto input = three_component_input();
  auto mix3 = solve_mixture(table_system(input), {5.0});
  for (double alpha : {0.01, 0.5, 0.99}) {
    double q = mixture_quantile(mix3, 5.0, alpha);
    CHECK(std::abs(mixture_cdf(mix3, 5.0, q) - alpha) < 1e-9);
  }

  using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double integral = quad::integrate(
      [&](double x) { return mixture_pdf(mix3, 5.0, x); }, -1.0, 1.0, 12,
      1e-10);
  CHECK(std::abs(integral - 1.0) < 1e-6);

  CHECK_THROWS_AS(mixture_pdf(mix3, 4.99, 0.0), Error);
  CHECK_THROWS_AS(mixture_quantile(mix3, 5.0, 1.5), Error);
}
