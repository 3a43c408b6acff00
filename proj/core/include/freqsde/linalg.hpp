#pragma once

#include <Eigen/Dense>

namespace freqsde {

// Matrix exponential e^M by scaling-and-squaring with the degree-13 Pade
// approximant. Throws NonFiniteInput for non-finite entries.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

}  // namespace freqsde
