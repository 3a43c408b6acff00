#pragma once

#include <functional>
#include <span>
#include <vector>

#include "freqsde/analytic.hpp"
#include "freqsde/mcs.hpp"

namespace freqsde {

// Empirical coverage of nominal-alpha quantiles minus alpha.
struct PdCurve {
  std::vector<double> alphas;
  std::vector<double> deviations;

  double max_abs_deviation() const;
};

PdCurve proportion_deviation(std::span<const double> samples,
                             const std::function<double(double)>& quantile_fn,
                             std::span<const double> alphas);

// Exact 1-D W1 distance between two empirical distributions: matched
// order statistics for equal sizes, integrated |CDF difference| on the
// merged support otherwise.
double wasserstein_1d(std::span<const double> samples_a,
                      std::span<const double> samples_b);

struct StddevRow {
  double time = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double relative_error = 0.0;
};

// Mixture-moment stddev of the analytic result against the MCS sample
// stddev at each requested time.
std::vector<StddevRow> stddev_comparison(const FrequencyMixture& mix,
                                         const McsResult& mcs,
                                         std::span<const double> times);

// Kolmogorov distance between the analytic mixture CDF at time t and the
// MCS empirical CDF, evaluated at the sample points.
double kolmogorov_distance(const FrequencyMixture& mix, const McsResult& mcs,
                           double t);

// Default PD grid {0.05, 0.10, ..., 0.95}.
std::vector<double> default_pd_alphas();

}  // namespace freqsde
