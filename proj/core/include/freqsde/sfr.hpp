#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "freqsde/ito.hpp"

namespace freqsde {

// Single-machine frequency-response parameters with wind VSG support.
// Powers are per-unit on the system base; frequency deviation is
// f0-normalized per-unit.
struct SfrParams {
  double governor_gain_inv = 16.5;  // 1/R
  double inertia = 4.96;            // H, s
  double turbine_coeff = 0.278;     // a
  double turbine_time = 10.0;       // T, s
  double damping = 1.2;             // D
  double vsg_droop = 0.05;          // delta_w
  double vsg_inertia = 2.0;         // H_w, s
  double sync_share = 0.7;          // K
  double vsg_share = 0.3;           // K1
  double nonvsg_share = 0.0;        // K2
  double gen_power = 0.0;           // P_G
  double load_power = 0.0;          // P_L
  double ref_freq = 50.0;           // f0, Hz
  // Damping used by the aggregated model; defaults to `damping`.
  std::optional<double> damping_override;

  void validate() const;  // share sum, positivity
  double effective_damping() const {
    return damping_override.value_or(damping);
  }
};

// Equivalent single-machine coefficients of the reduced model.
struct AggregatedSfr {
  double h_s = 0.0;  // system inertia, s
  double a_s = 0.0;  // equivalent turbine coefficient
  double r_s = 0.0;  // equivalent governor coefficient
  double d_s = 0.0;  // equivalent damping
};

AggregatedSfr aggregate(const SfrParams& params);

// Per-component linear SDE dX = (A X + c_i) dt + B_i dW over state
// (t_g, df, P_w). All component SDEs share A and x0.
struct LinearSdeSystem {
  Eigen::Matrix3d state_matrix;
  std::vector<Eigen::Vector3d> constants;   // c_i
  std::vector<Eigen::Vector3d> diffusions;  // B_i, zero in first two rows
  Eigen::Vector3d initial_state;
  std::vector<double> weights;
  double drift_rate = 1.0;  // lambda_w

  std::size_t component_count() const { return constants.size(); }
};

// Assembles the 3x3 system; asserts every eigenvalue of A has negative
// real part (UnstableSystem otherwise, reporting the offending value).
LinearSdeSystem build_sde_system(
    const AggregatedSfr& agg, const SfrParams& params,
    const GeneralizedItoProcess& process,
    const std::optional<Eigen::Vector3d>& x0_override = std::nullopt);

struct StepResponse {
  std::vector<double> times;
  std::vector<double> df;          // per-unit frequency deviation
  double nadir = 0.0;              // minimum df over the grid
  double steady_state = 0.0;       // df as t -> inf
  double initial_rocof = 0.0;      // dP / (2 H_s)
};

// Deterministic response of the reduced 2x2 model to a power step,
// solved exactly with the matrix exponential.
StepResponse step_response(const AggregatedSfr& agg, const SfrParams& params,
                           double disturbance,
                           const std::vector<double>& t_grid);

}  // namespace freqsde
