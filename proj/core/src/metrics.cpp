#include "freqsde/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "freqsde/errors.hpp"

namespace freqsde {

double PdCurve::max_abs_deviation() const {
  double m = 0.0;
  for (double d : deviations) m = std::max(m, std::abs(d));
  return m;
}

PdCurve proportion_deviation(std::span<const double> samples,
                             const std::function<double(double)>& quantile_fn,
                             std::span<const double> alphas) {
  if (samples.empty()) {
    throw Error::config("EmptySamples", "proportion deviation needs samples");
  }
  PdCurve curve;
  const double n = static_cast<double>(samples.size());
  for (double alpha : alphas) {
    double q = quantile_fn(alpha);
    std::size_t covered = 0;
    for (double x : samples) {
      if (x <= q) ++covered;
    }
    curve.alphas.push_back(alpha);
    curve.deviations.push_back(static_cast<double>(covered) / n - alpha);
  }
  return curve;
}

double wasserstein_1d(std::span<const double> samples_a,
                      std::span<const double> samples_b) {
  if (samples_a.empty() || samples_b.empty()) {
    throw Error::config("EmptySamples", "wasserstein_1d needs samples");
  }
  std::vector<double> a(samples_a.begin(), samples_a.end());
  std::vector<double> b(samples_b.begin(), samples_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  if (a.size() == b.size()) {
    // The monotone coupling matches order statistics.
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
  }

  // Integrate |F_a - F_b| over the merged grid.
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(),
             std::back_inserter(grid));
  double dist = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    while (ia < a.size() && a[ia] <= grid[g]) ++ia;
    while (ib < b.size() && b[ib] <= grid[g]) ++ib;
    double fa = static_cast<double>(ia) / static_cast<double>(a.size());
    double fb = static_cast<double>(ib) / static_cast<double>(b.size());
    dist += std::abs(fa - fb) * (grid[g + 1] - grid[g]);
  }
  return dist;
}

std::vector<StddevRow> stddev_comparison(const FrequencyMixture& mix,
                                         const McsResult& mcs,
                                         std::span<const double> times) {
  std::vector<StddevRow> rows;
  for (double t : times) {
    StddevRow row;
    row.time = t;
    row.analytic = mix.mixture_stddev(mix.time_index(t));
    row.empirical = mcs.sample_stddev(mcs.capture_index(t));
    row.relative_error =
        row.empirical != 0.0
            ? std::abs(row.analytic - row.empirical) / row.empirical
            : std::abs(row.analytic);
    rows.push_back(row);
  }
  return rows;
}

double kolmogorov_distance(const FrequencyMixture& mix, const McsResult& mcs,
                           double t) {
  std::vector<double> s = mcs.samples.at(mcs.capture_index(t));
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double f = mixture_cdf(mix, t, s[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(f - lo), std::abs(f - hi)});
  }
  return d;
}

std::vector<double> default_pd_alphas() {
  std::vector<double> alphas;
  for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
  return alphas;
}

}  // namespace freqsde
