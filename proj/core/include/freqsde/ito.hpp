#pragma once

#include <functional>
#include <vector>

#include "freqsde/gmm.hpp"

namespace freqsde {

// One OU-type sub-process: dP = (-drift_rate*P + drift_rate*drift_target) dt
//                              + diffusion dW.
struct ItoComponent {
  double drift_rate = 1.0;    // lambda_w, > 0
  double drift_target = 0.0;  // mu_{w,i}
  double diffusion = 0.0;     // sqrt(2*lambda_w*sigma_{w,i}^2)
  double weight = 1.0;
};

// Weighted collection of OU sub-processes whose stationary mixture
// reproduces the source Gmm. All components share drift_rate.
struct GeneralizedItoProcess {
  std::vector<ItoComponent> components;
  double initial_value = 0.0;  // shared P_w start, defaults to the Gmm mean
};

// Decomposes a Gmm into sub-processes. The diffusion is scaled so each
// sub-process's stationary law stays N(mu_i, sigma_i^2) for any
// drift_rate; at drift_rate=1 it is exactly sqrt(2*sigma_i^2).
GeneralizedItoProcess from_gmm(const Gmm& model, double drift_rate = 1.0);

// Diffusion-squared tau^2(x) = 2*int_{-inf}^{x} m(z) p(z) dz / p(x),
// evaluated by adaptive quadrature. Verification oracle for the closed
// form, not used in the pipeline.
double diffusion_from_pdf(const std::function<double(double)>& density,
                          const std::function<double(double)>& drift,
                          double x, double quad_tol = 1e-10);

}  // namespace freqsde
