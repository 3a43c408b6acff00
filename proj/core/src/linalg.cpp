#include "freqsde/linalg.hpp"

#include <cmath>

#include "freqsde/errors.hpp"

namespace freqsde {

namespace {

// Pade approximant of degree d to exp at 0: returns (U, V) with
// p(M) = U + V, q(M) = -U + V so that exp(M) ~= q^{-1} p.
void pade13(const Eigen::MatrixXd& m, Eigen::MatrixXd& u,
            Eigen::MatrixXd& v) {
  static const double b[] = {64764752532480000., 32382376266240000.,
                             7771770303897600.,  1187353796428800.,
                             129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,
                             1323241920.,        40840800.,
                             960960.,            16380.,
                             182.,               1.};
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd m2 = m * m;
  const Eigen::MatrixXd m4 = m2 * m2;
  const Eigen::MatrixXd m6 = m4 * m2;
  u = m * (m6 * (b[13] * m6 + b[11] * m4 + b[9] * m2) + b[7] * m6 +
           b[5] * m4 + b[3] * m2 + b[1] * id);
  v = m6 * (b[12] * m6 + b[10] * m4 + b[8] * m2) + b[6] * m6 + b[4] * m4 +
      b[2] * m2 + b[0] * id;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    throw Error::numeric("NonFiniteInput",
                         "matrix exponential of non-finite matrix");
  }
  const double theta13 = 5.371920351148152;  // Higham's 1-norm bound
  double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  Eigen::MatrixXd a = m;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    a /= std::pow(2.0, squarings);
  }
  Eigen::MatrixXd u, v;
  pade13(a, u, v);
  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace freqsde
