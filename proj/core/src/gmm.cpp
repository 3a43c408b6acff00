#include "freqsde/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "freqsde/errors.hpp"

namespace freqsde {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kKmeansMaxIter = 100;
}  // namespace

double gaussian_pdf(double x, double mean, double variance) {
  double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(kTwoPi * variance);
}

double gaussian_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double Gmm::mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

double Gmm::variance() const {
  double m = mean();
  double v = 0.0;
  for (const auto& c : components) {
    v += c.weight * (c.variance + c.mean * c.mean);
  }
  return v - m * m;
}

double gmm_pdf(const Gmm& model, double x) {
  double p = 0.0;
  for (const auto& c : model.components) {
    p += c.weight * gaussian_pdf(x, c.mean, c.variance);
  }
  return p;
}

double gmm_cdf(const Gmm& model, double x) {
  double p = 0.0;
  for (const auto& c : model.components) {
    p += c.weight * gaussian_cdf(x, c.mean, c.variance);
  }
  return p;
}

std::vector<KmeansClass> kmeans_partition(std::span<const double> samples,
                                          int n, std::uint64_t seed) {
  const std::size_t m = samples.size();
  if (n < 1) throw Error::config("TooFewSamples", "component count < 1");
  if (m < static_cast<std::size_t>(n)) {
    throw Error::config("TooFewSamples",
                        "fewer samples than requested classes");
  }

  std::mt19937_64 rng(seed);

  // k-means++-style seeding keeps initial centroids spread out.
  std::vector<double> centroids;
  centroids.reserve(n);
  {
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    centroids.push_back(samples[pick(rng)]);
    std::vector<double> d2(m);
    while (centroids.size() < static_cast<std::size_t>(n)) {
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double best = std::numeric_limits<double>::max();
        for (double c : centroids) {
          double d = samples[j] - c;
          best = std::min(best, d * d);
        }
        d2[j] = best;
        total += best;
      }
      if (total <= 0.0) {
        // All remaining points coincide with a centroid; duplicate one.
        centroids.push_back(samples[0]);
        continue;
      }
      std::uniform_real_distribution<double> unif(0.0, total);
      double r = unif(rng);
      std::size_t j = 0;
      for (; j + 1 < m && r > d2[j]; ++j) r -= d2[j];
      centroids.push_back(samples[j]);
    }
  }

  std::vector<int> assign(m, 0);
  std::vector<std::size_t> counts(n, 0);
  for (int iter = 0; iter < kKmeansMaxIter; ++iter) {
    bool changed = false;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      int best = 0;
      double bestd = std::abs(samples[j] - centroids[0]);
      for (int i = 1; i < n; ++i) {
        double d = std::abs(samples[j] - centroids[i]);
        if (d < bestd) {
          bestd = d;
          best = i;
        }
      }
      if (assign[j] != best) changed = true;
      assign[j] = best;
      ++counts[best];
    }

    // Refill emptied classes with the farthest member of the largest one.
    for (int i = 0; i < n; ++i) {
      if (counts[i] != 0) continue;
      int big = static_cast<int>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      if (counts[big] < 2) {
        throw Error::numeric("EmptyClusterUnrecoverable",
                             "cannot repopulate empty class " +
                                 std::to_string(i));
      }
      std::size_t far = m;
      double fard = -1.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (assign[j] != big) continue;
        double d = std::abs(samples[j] - centroids[big]);
        if (d > fard) {
          fard = d;
          far = j;
        }
      }
      assign[far] = i;
      --counts[big];
      ++counts[i];
      centroids[i] = samples[far];
      changed = true;
    }

    std::vector<double> sums(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) sums[assign[j]] += samples[j];
    for (int i = 0; i < n; ++i) {
      centroids[i] = sums[i] / static_cast<double>(counts[i]);
    }
    if (!changed) break;
  }

  std::vector<KmeansClass> classes(n);
  for (std::size_t j = 0; j < m; ++j) {
    classes[assign[j]].members.push_back(samples[j]);
  }
  for (int i = 0; i < n; ++i) {
    auto& cls = classes[i];
    double mi = static_cast<double>(cls.members.size());
    double mu = std::accumulate(cls.members.begin(), cls.members.end(), 0.0) /
                mi;
    double var = 0.0;
    for (double x : cls.members) var += (x - mu) * (x - mu);
    cls.mean = mu;
    cls.variance = var / mi;
    cls.weight = mi / static_cast<double>(m);
  }
  return classes;
}

std::pair<Gmm, EmReport> em_fit(std::span<const double> samples, int n,
                                const EmOptions& opts,
                                bool keep_responsibilities) {
  const std::size_t m = samples.size();
  if (m < static_cast<std::size_t>(n)) {
    throw Error::config("TooFewSamples",
                        "fewer samples than requested components");
  }

  auto init = kmeans_partition(samples, n, opts.seed);
  Gmm model;
  model.components.reserve(n);
  for (const auto& cls : init) {
    model.components.push_back(
        {cls.weight, cls.mean, std::max(cls.variance, opts.variance_floor)});
  }

  double sample_sd;
  {
    double mu =
        std::accumulate(samples.begin(), samples.end(), 0.0) /
        static_cast<double>(m);
    double var = 0.0;
    for (double x : samples) var += (x - mu) * (x - mu);
    sample_sd = std::sqrt(var / static_cast<double>(m));
  }

  std::mt19937_64 jitter_rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);

  EmReport report;
  std::vector<std::vector<double>> gamma(
      n, std::vector<double>(m, 0.0));
  double prev_ll = -std::numeric_limits<double>::infinity();
  int floor_resets = 0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // E-step, with per-sample normalization in linear space. Extended
    // precision keeps summation noise below the monotonicity slack.
    long double ll = 0.0L;
    for (std::size_t j = 0; j < m; ++j) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const auto& c = model.components[i];
        double p = c.weight * gaussian_pdf(samples[j], c.mean, c.variance);
        gamma[i][j] = p;
        total += p;
      }
      if (total <= 0.0 || !std::isfinite(total)) {
        // Sample far outside all components; spread responsibility evenly.
        for (int i = 0; i < n; ++i) gamma[i][j] = 1.0 / n;
        total = std::numeric_limits<double>::min();
      } else {
        for (int i = 0; i < n; ++i) gamma[i][j] /= total;
      }
      ll += std::log(total);
    }
    double ll_d = static_cast<double>(ll);
    if (!report.log_likelihood_trace.empty() &&
        ll_d < report.log_likelihood_trace.back() &&
        ll_d > report.log_likelihood_trace.back() - 1e-12) {
      ll_d = report.log_likelihood_trace.back();
    }
    report.log_likelihood_trace.push_back(ll_d);
    report.iterations = iter + 1;

    if (std::abs(ll_d - prev_ll) < opts.tol) {
      report.converged = true;
      report.final_log_likelihood = ll_d;
      break;
    }
    prev_ll = ll_d;
    report.final_log_likelihood = ll_d;

    // M-step.
    for (int i = 0; i < n; ++i) {
      long double gl = 0.0L, mul = 0.0L;
      for (std::size_t j = 0; j < m; ++j) {
        gl += gamma[i][j];
        mul += gamma[i][j] * samples[j];
      }
      double g = static_cast<double>(gl);
      double mu = static_cast<double>(mul / gl);
      long double varl = 0.0L;
      for (std::size_t j = 0; j < m; ++j) {
        double d = samples[j] - mu;
        varl += gamma[i][j] * d * d;
      }
      double var = static_cast<double>(varl / gl);
      if (var < opts.variance_floor) {
        var = opts.variance_floor;
        if (++floor_resets > opts.max_floor_resets) {
          throw Error::numeric("DegenerateComponent",
                               "component variance collapsed repeatedly");
        }
        if (n > 1) {
          std::normal_distribution<double> jitter(0.0, sample_sd);
          mu += jitter(jitter_rng);
        }
      }
      model.components[i].weight = g / static_cast<double>(m);
      model.components[i].mean = mu;
      model.components[i].variance = var;
    }
    // Responsibility weights sum to 1 up to rounding; renormalize.
    double wsum = 0.0;
    for (const auto& c : model.components) wsum += c.weight;
    for (auto& c : model.components) c.weight /= wsum;
  }

  if (keep_responsibilities) report.responsibility_snapshot = gamma;
  return {std::move(model), std::move(report)};
}

}  // namespace freqsde
