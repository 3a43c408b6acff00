#pragma once

#include <vector>

#include <Eigen/Dense>

#include "freqsde/gmm.hpp"
#include "freqsde/sfr.hpp"

namespace freqsde {

// Mean and covariance of one sub-process state at one time.
struct GaussianMoment {
  double time = 0.0;
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;
};

// Eigendecomposition of the state matrix, shared by all covariance
// evaluations. P * diag(eigenvalues) * P^{-1} reconstructs A.
struct EigenWork {
  Eigen::Vector3cd eigenvalues;
  Eigen::Matrix3cd eigenvectors;      // P
  Eigen::Matrix3cd eigenvectors_inv;  // P^{-1}
  double condition = 0.0;             // 2-norm condition of P
};

EigenWork build_eigenwork(const Eigen::Matrix3d& state_matrix);

struct SolverOptions {
  double eigen_condition_limit = 1e8;  // beyond this, quadrature fallback
  double imag_truncation = 1e-9;       // residue above this is an error
  int threads = 1;
};

// Exact mean of the i-th sub-process at time t:
// e^{At}(x0 + A^{-1} c_i) - A^{-1} c_i.
Eigen::Vector3d solve_mean(const LinearSdeSystem& system, std::size_t component,
                           double t);

// Exact covariance via the eigenbasis formula
// P {[P^{-1} B B^T P^{-T}] o J} P^T with J(k,j) = (e^{(lk+lj)t}-1)/(lk+lj)
// (limit t when lk+lj ~ 0). Falls back to quadrature of the covariance
// integral when the eigenbasis is ill-conditioned.
Eigen::Matrix3d solve_covariance(const LinearSdeSystem& system,
                                 std::size_t component, double t,
                                 const SolverOptions& opts = {});

// Direct quadrature of int_0^t e^{A(t-s)} B B^T e^{A^T(t-s)} ds, refined
// until two successive composite rules agree to 1e-10 Frobenius.
Eigen::MatrixXd covariance_by_quadrature(const Eigen::MatrixXd& state_matrix,
                                         const Eigen::VectorXd& diffusion,
                                         double t);

// Weighted Gaussian mixture over df at each grid time; the weights stay
// equal to the source Gmm weights at every time.
struct FrequencyMixture {
  std::vector<double> times;
  std::vector<double> weights;              // per component, time-invariant
  std::vector<std::vector<double>> means;   // [time][component]
  std::vector<std::vector<double>> vars;    // [time][component]

  std::size_t time_index(double t) const;   // throws TimeNotOnGrid
  Gmm slice(std::size_t time_idx) const;
  double mixture_mean(std::size_t time_idx) const;
  double mixture_stddev(std::size_t time_idx) const;
};

FrequencyMixture solve_mixture(const LinearSdeSystem& system,
                               const std::vector<double>& t_grid,
                               const SolverOptions& opts = {});

double mixture_pdf(const FrequencyMixture& mix, double t, double x);
double mixture_cdf(const FrequencyMixture& mix, double t, double x);
// Quantile by bisection on the cdf to 1e-10; alpha in (0,1).
double mixture_quantile(const FrequencyMixture& mix, double t, double alpha);

}  // namespace freqsde
