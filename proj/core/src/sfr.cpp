#include "freqsde/sfr.hpp"

#include <cmath>
#include <string>

#include "freqsde/errors.hpp"
#include "freqsde/linalg.hpp"

namespace freqsde {

void SfrParams::validate() const {
  if (std::abs(sync_share + vsg_share + nonvsg_share - 1.0) > 1e-12) {
    throw Error::config("ShareSumViolation", "K + K1 + K2 must equal 1");
  }
  if (inertia <= 0.0 || turbine_time <= 0.0 || governor_gain_inv <= 0.0) {
    throw Error::config("InvalidSfrParams",
                        "H, T and 1/R must be positive");
  }
  if (vsg_share > 0.0 && !(vsg_droop > 0.0)) {
    throw Error::config("InvalidSfrParams",
                        "delta_w must be positive when K1 > 0");
  }
  if (sync_share < 0.0 || vsg_share < 0.0 || nonvsg_share < 0.0 ||
      vsg_inertia < 0.0) {
    throw Error::config("InvalidSfrParams", "shares must be non-negative");
  }
}

AggregatedSfr aggregate(const SfrParams& p) {
  p.validate();
  const double r = 1.0 / p.governor_gain_inv;
  const double droop_term =
      p.vsg_share > 0.0 ? r * p.vsg_share / p.vsg_droop : 0.0;
  const double denom = p.sync_share + droop_term;
  if (!(denom > 0.0)) {
    throw Error::numeric("DegenerateAggregation",
                         "K + R*K1/delta_w must be positive");
  }
  AggregatedSfr agg;
  agg.h_s = p.sync_share * p.inertia + p.vsg_share * p.vsg_inertia;
  agg.a_s = (p.sync_share * p.turbine_coeff + droop_term) / denom;
  agg.r_s = p.sync_share / denom * r;
  agg.d_s = p.effective_damping();
  return agg;
}

namespace {

Eigen::Matrix2d reduced_matrix(const AggregatedSfr& agg,
                               const SfrParams& p) {
  Eigen::Matrix2d a;
  a << -1.0 / p.turbine_time,
      (1.0 - agg.a_s) / (agg.r_s * p.turbine_time),
      -p.sync_share / (2.0 * agg.h_s),
      -(agg.d_s + p.sync_share * agg.a_s / agg.r_s) / (2.0 * agg.h_s);
  return a;
}

void check_stable(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    std::complex<double> lambda = es.eigenvalues()[k];
    if (lambda.real() >= 0.0) {
      throw Error::numeric(
          "UnstableSystem",
          "eigenvalue with non-negative real part: " +
              std::to_string(lambda.real()) + (lambda.imag() >= 0 ? "+" : "") +
              std::to_string(lambda.imag()) + "i");
    }
  }
}

}  // namespace

LinearSdeSystem build_sde_system(
    const AggregatedSfr& agg, const SfrParams& params,
    const GeneralizedItoProcess& process,
    const std::optional<Eigen::Vector3d>& x0_override) {
  params.validate();
  if (process.components.empty()) {
    throw Error::config("InvalidProcess", "process has no components");
  }
  const double lambda_w = process.components.front().drift_rate;

  LinearSdeSystem sys;
  sys.drift_rate = lambda_w;
  sys.state_matrix.setZero();
  sys.state_matrix.topLeftCorner<2, 2>() = reduced_matrix(agg, params);
  sys.state_matrix(1, 2) = 1.0 / (2.0 * agg.h_s);
  sys.state_matrix(2, 2) = -lambda_w;

  check_stable(sys.state_matrix);

  const double imbalance =
      (params.gen_power - params.load_power) / (2.0 * agg.h_s);
  for (const auto& c : process.components) {
    sys.constants.emplace_back(0.0, imbalance, lambda_w * c.drift_target);
    sys.diffusions.emplace_back(0.0, 0.0, c.diffusion);
    sys.weights.push_back(c.weight);
  }
  sys.initial_state = x0_override.value_or(
      Eigen::Vector3d(0.0, 0.0, process.initial_value));
  return sys;
}

StepResponse step_response(const AggregatedSfr& agg, const SfrParams& params,
                           double disturbance,
                           const std::vector<double>& t_grid) {
  const Eigen::Matrix2d a = reduced_matrix(agg, params);
  check_stable(a);
  const Eigen::Vector2d forcing(0.0, disturbance / (2.0 * agg.h_s));
  // Steady state of dx/dt = Ax + c is -A^{-1} c.
  const Eigen::Vector2d x_ss = -a.partialPivLu().solve(forcing);

  StepResponse resp;
  resp.times = t_grid;
  resp.df.reserve(t_grid.size());
  resp.initial_rocof = disturbance / (2.0 * agg.h_s);
  resp.steady_state = x_ss(1);

  // x(t) = e^{At}(x0 - x_ss) + x_ss with x0 = 0.
  double nadir = 0.0;
  for (double t : t_grid) {
    Eigen::Matrix2d eat = expm(a * t);
    Eigen::Vector2d x = eat * (-x_ss) + x_ss;
    resp.df.push_back(x(1));
    nadir = std::min(nadir, x(1));
  }
  resp.nadir = nadir;
  return resp;
}

}  // namespace freqsde
