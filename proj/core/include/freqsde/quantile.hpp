#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace freqsde {

// Nonparametric predictive distribution of wind power, given as
// (nominal proportion, quantile value) pairs for one forecast instant.
class QuantileSeries {
 public:
  // Validates and constructs. Throws Error with codes:
  // LengthMismatch, NonMonotoneProportions, ProportionOutOfRange,
  // CrossingQuantiles. Crossing quantiles are rejected, never sorted.
  QuantileSeries(std::vector<double> proportions, std::vector<double> values,
                 std::string horizon_id);

  const std::vector<double>& proportions() const { return proportions_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& horizon_id() const { return horizon_id_; }
  std::size_t size() const { return proportions_.size(); }

 private:
  std::vector<double> proportions_;
  std::vector<double> values_;
  std::string horizon_id_;
};

// Piecewise-linear inverse CDF through the quantile knots. Outside
// [alpha_1, alpha_R] the end segments are extrapolated linearly and the
// result is clamped to [0, p_max]. u must lie in (0,1).
double inverse_cdf(const QuantileSeries& series, double u, double p_max = 1.0);

// Inverse-transform sampling: `count` draws of inverse_cdf at seeded
// uniforms. Deterministic for a fixed seed.
std::vector<double> sample(const QuantileSeries& series, std::size_t count,
                           std::uint64_t seed, double p_max = 1.0);

}  // namespace freqsde
