#include "freqsde/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "freqsde/errors.hpp"
#include "freqsde/linalg.hpp"

namespace freqsde {

EigenWork build_eigenwork(const Eigen::Matrix3d& state_matrix) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(state_matrix);
  if (es.info() != Eigen::Success) {
    throw Error::numeric("EigenFailure", "eigendecomposition failed");
  }
  EigenWork work;
  work.eigenvalues = es.eigenvalues();
  work.eigenvectors = es.eigenvectors();
  work.eigenvectors_inv = work.eigenvectors.inverse();
  Eigen::JacobiSVD<Eigen::Matrix3cd> svd(work.eigenvectors);
  work.condition = svd.singularValues()(0) / svd.singularValues()(2);
  return work;
}

Eigen::Vector3d solve_mean(const LinearSdeSystem& system,
                           std::size_t component, double t) {
  const Eigen::Matrix3d& a = system.state_matrix;
  Eigen::Vector3d ainv_c =
      a.partialPivLu().solve(system.constants.at(component));
  if (!ainv_c.allFinite()) {
    throw Error::numeric("SingularA", "state matrix is singular");
  }
  Eigen::Matrix3d eat = expm(a * t);
  return eat * (system.initial_state + ainv_c) - ainv_c;
}

namespace {

Eigen::Matrix3d eigen_covariance(const EigenWork& work,
                                 const Eigen::Vector3d& diffusion, double t,
                                 double imag_truncation) {
  Eigen::Matrix3cd bbt =
      (diffusion * diffusion.transpose()).cast<std::complex<double>>();
  Eigen::Matrix3cd core = work.eigenvectors_inv * bbt *
                          work.eigenvectors_inv.transpose();
  Eigen::Matrix3cd j;
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      std::complex<double> s = work.eigenvalues(k) + work.eigenvalues(l);
      if (std::abs(s) < 1e-10) {
        j(k, l) = t;  // removable singularity, series limit
      } else {
        j(k, l) = (std::exp(s * t) - 1.0) / s;
      }
    }
  }
  Eigen::Matrix3cd var = work.eigenvectors * core.cwiseProduct(j) *
                         work.eigenvectors.transpose();
  double residue = var.imag().cwiseAbs().maxCoeff();
  if (residue > imag_truncation) {
    throw Error::numeric("ComplexResidue",
                         "imaginary residue " + std::to_string(residue) +
                             " exceeds truncation threshold");
  }
  Eigen::Matrix3d real = var.real();
  return 0.5 * (real + real.transpose());
}

}  // namespace

Eigen::MatrixXd covariance_by_quadrature(const Eigen::MatrixXd& state_matrix,
                                         const Eigen::VectorXd& diffusion,
                                         double t) {
  const Eigen::Index n = state_matrix.rows();
  const Eigen::MatrixXd bbt = diffusion * diffusion.transpose();
  using rule = boost::math::quadrature::gauss<double, 20>;

  auto integrate = [&](int pieces) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    double h = t / pieces;
    for (int p = 0; p < pieces; ++p) {
      double lo = p * h;
      double mid = lo + 0.5 * h;
      double half = 0.5 * h;
      // Map the symmetric rule onto [lo, lo+h]; the abscissa array holds
      // the non-negative nodes only.
      for (std::size_t q = 0; q < rule::abscissa().size(); ++q) {
        double xq = rule::abscissa()[q];
        double wq = rule::weights()[q] * half;
        for (double sgn : {-1.0, 1.0}) {
          if (xq == 0.0 && sgn > 0.0) continue;
          double u = mid + sgn * half * xq;  // u = t - s
          Eigen::MatrixXd eau = expm(state_matrix * u);
          acc.noalias() += wq * (eau * bbt * eau.transpose());
        }
      }
    }
    return acc;
  };

  Eigen::MatrixXd prev = integrate(1);
  for (int pieces = 2; pieces <= 64; pieces *= 2) {
    Eigen::MatrixXd cur = integrate(pieces);
    if ((cur - prev).norm() < 1e-10 * std::max(1.0, cur.norm())) {
      return cur;
    }
    prev = cur;
  }
  throw Error::numeric("NonConvergedFallback",
                       "covariance quadrature did not converge");
}

Eigen::Matrix3d solve_covariance(const LinearSdeSystem& system,
                                 std::size_t component, double t,
                                 const SolverOptions& opts) {
  if (t == 0.0) return Eigen::Matrix3d::Zero();
  EigenWork work = build_eigenwork(system.state_matrix);
  if (work.condition > opts.eigen_condition_limit) {
    return covariance_by_quadrature(system.state_matrix,
                                    system.diffusions.at(component), t);
  }
  return eigen_covariance(work, system.diffusions.at(component), t,
                          opts.imag_truncation);
}

std::size_t FrequencyMixture::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < 1e-9) return i;
  }
  throw Error::config("TimeNotOnGrid",
                      "t=" + std::to_string(t) + " not on the solver grid");
}

Gmm FrequencyMixture::slice(std::size_t time_idx) const {
  Gmm g;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    g.components.push_back(
        {weights[i], means.at(time_idx)[i], vars.at(time_idx)[i]});
  }
  return g;
}

double FrequencyMixture::mixture_mean(std::size_t time_idx) const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    m += weights[i] * means.at(time_idx)[i];
  }
  return m;
}

double FrequencyMixture::mixture_stddev(std::size_t time_idx) const {
  double m = mixture_mean(time_idx);
  double v = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double mu = means.at(time_idx)[i];
    v += weights[i] * (vars.at(time_idx)[i] + mu * mu);
  }
  return std::sqrt(std::max(0.0, v - m * m));
}

FrequencyMixture solve_mixture(const LinearSdeSystem& system,
                               const std::vector<double>& t_grid,
                               const SolverOptions& opts) {
  const std::size_t nc = system.component_count();
  FrequencyMixture mix;
  mix.times = t_grid;
  mix.weights = system.weights;
  mix.means.assign(t_grid.size(), std::vector<double>(nc, 0.0));
  mix.vars.assign(t_grid.size(), std::vector<double>(nc, 0.0));

  EigenWork work = build_eigenwork(system.state_matrix);
  const bool fallback = work.condition > opts.eigen_condition_limit;

  auto solve_time = [&](std::size_t ti) {
    double t = t_grid[ti];
    for (std::size_t i = 0; i < nc; ++i) {
      Eigen::Vector3d mean = solve_mean(system, i, t);
      Eigen::Matrix3d cov;
      if (t == 0.0) {
        cov.setZero();
      } else if (fallback) {
        cov = covariance_by_quadrature(system.state_matrix,
                                       system.diffusions[i], t);
      } else {
        cov = eigen_covariance(work, system.diffusions[i], t,
                               opts.imag_truncation);
      }
      // df is the second state entry.
      mix.means[ti][i] = mean(1);
      mix.vars[ti][i] = std::max(0.0, cov(1, 1));
    }
  };

  int threads = std::max(1, opts.threads);
  if (threads == 1 || t_grid.size() < 2) {
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) solve_time(ti);
  } else {
    std::vector<std::thread> pool;
    std::size_t per = (t_grid.size() + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      std::size_t lo = w * per;
      std::size_t hi = std::min(t_grid.size(), lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t ti = lo; ti < hi; ++ti) solve_time(ti);
      });
    }
    for (auto& th : pool) th.join();
  }
  return mix;
}

double mixture_pdf(const FrequencyMixture& mix, double t, double x) {
  return gmm_pdf(mix.slice(mix.time_index(t)), x);
}

double mixture_cdf(const FrequencyMixture& mix, double t, double x) {
  return gmm_cdf(mix.slice(mix.time_index(t)), x);
}

double mixture_quantile(const FrequencyMixture& mix, double t, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::config("AlphaOutOfRange",
                        "alpha=" + std::to_string(alpha) + " outside (0,1)");
  }
  Gmm g = mix.slice(mix.time_index(t));

  // Bracket using the widest component spread.
  double lo = g.components.front().mean, hi = lo;
  for (const auto& c : g.components) {
    double sd = std::sqrt(std::max(c.variance, 1e-300));
    lo = std::min(lo, c.mean - 12.0 * sd);
    hi = std::max(hi, c.mean + 12.0 * sd);
  }
  while (gmm_cdf(g, lo) > alpha) lo -= (hi - lo);
  while (gmm_cdf(g, hi) < alpha) hi += (hi - lo);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    double mid = 0.5 * (lo + hi);
    if (gmm_cdf(g, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace freqsde
