#include "freqsde/ito.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "freqsde/errors.hpp"

namespace freqsde {

GeneralizedItoProcess from_gmm(const Gmm& model, double drift_rate) {
  if (!(drift_rate > 0.0) || !std::isfinite(drift_rate)) {
    throw Error::config("InvalidDriftRate", "drift_rate must be positive");
  }
  GeneralizedItoProcess proc;
  proc.components.reserve(model.components.size());
  for (const auto& c : model.components) {
    proc.components.push_back({drift_rate, c.mean,
                               std::sqrt(2.0 * drift_rate * c.variance),
                               c.weight});
  }
  proc.initial_value = model.mean();
  return proc;
}

double diffusion_from_pdf(const std::function<double(double)>& density,
                          const std::function<double(double)>& drift,
                          double x, double quad_tol) {
  double px = density(x);
  if (!(px > 1e-300)) {
    throw Error::numeric("VanishingDensity",
                         "density underflows at evaluation point");
  }
  using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double integral;
  try {
    integral = quad::integrate(
        [&](double z) { return drift(z) * density(z); },
        -std::numeric_limits<double>::infinity(), x, 15, quad_tol, &err);
  } catch (const std::exception& e) {
    throw Error::numeric("QuadratureFailure", e.what());
  }
  if (!std::isfinite(integral) || err > std::max(quad_tol, 1e-8)) {
    throw Error::numeric("QuadratureFailure",
                         "integral did not converge to tolerance");
  }
  return 2.0 * integral / px;
}

}  // namespace freqsde
