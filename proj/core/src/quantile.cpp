#include "freqsde/quantile.hpp"

#include <algorithm>
#include <random>

#include "freqsde/errors.hpp"

namespace freqsde {

QuantileSeries::QuantileSeries(std::vector<double> proportions,
                               std::vector<double> values,
                               std::string horizon_id)
    : proportions_(std::move(proportions)),
      values_(std::move(values)),
      horizon_id_(std::move(horizon_id)) {
  if (proportions_.size() != values_.size()) {
    throw Error::config("LengthMismatch",
                        "proportions and values differ in length");
  }
  if (proportions_.size() < 2) {
    throw Error::config("LengthMismatch",
                        "need at least two quantile knots");
  }
  for (double a : proportions_) {
    if (!(a > 0.0 && a < 1.0)) {
      throw Error::config("ProportionOutOfRange",
                          "proportion " + std::to_string(a) +
                              " outside (0,1)");
    }
  }
  for (std::size_t r = 1; r < proportions_.size(); ++r) {
    if (!(proportions_[r] > proportions_[r - 1])) {
      throw Error::config("NonMonotoneProportions",
                          "proportions must be strictly increasing");
    }
    if (values_[r] < values_[r - 1]) {
      throw Error::config("CrossingQuantiles",
                          "quantile values must be non-decreasing");
    }
  }
}

double inverse_cdf(const QuantileSeries& series, double u, double p_max) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error::config("UOutOfRange",
                        "u=" + std::to_string(u) + " outside (0,1)");
  }
  const auto& a = series.proportions();
  const auto& q = series.values();
  const std::size_t n = a.size();

  auto segment = [&](std::size_t lo, double x) {
    double da = a[lo + 1] - a[lo];
    double slope = (q[lo + 1] - q[lo]) / da;
    return q[lo] + slope * (x - a[lo]);
  };

  // Only the extrapolated tails are clamped to the physical band.
  if (u <= a.front()) {
    return std::clamp(segment(0, u), 0.0, p_max);
  }
  if (u >= a.back()) {
    return std::clamp(segment(n - 2, u), 0.0, p_max);
  }
  auto it = std::upper_bound(a.begin(), a.end(), u);
  std::size_t lo = static_cast<std::size_t>(it - a.begin()) - 1;
  return segment(lo, u);
}

std::vector<double> sample(const QuantileSeries& series, std::size_t count,
                           std::uint64_t seed, double p_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double u = unif(rng);
    while (u <= 0.0 || u >= 1.0) u = unif(rng);
    out.push_back(inverse_cdf(series, u, p_max));
  }
  return out;
}

}  // namespace freqsde
