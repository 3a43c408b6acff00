#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace freqsde {

struct GaussianComponent {
  double weight = 1.0;    // in (0,1]
  double mean = 0.0;      // per-unit power
  double variance = 0.0;  // per-unit power squared
};

// One-dimensional Gaussian mixture. Weights sum to 1 within 1e-12.
struct Gmm {
  std::vector<GaussianComponent> components;

  double mean() const;
  double variance() const;
};

struct EmOptions {
  double tol = 1e-8;          // absolute |delta log-likelihood|
  int max_iter = 500;
  std::uint64_t seed = 0;     // k-means centroid seeding
  double variance_floor = 1e-10;
  int max_floor_resets = 20;  // DegenerateComponent beyond this
};

struct EmReport {
  int iterations = 0;
  double final_log_likelihood = 0.0;
  bool converged = false;
  // Per-iteration log-likelihood trace; non-decreasing within 1e-12.
  std::vector<double> log_likelihood_trace;
  // gamma[i][j]: responsibility of component i for sample j at the last
  // E-step, kept only when requested.
  std::optional<std::vector<std::vector<double>>> responsibility_snapshot;
};

struct KmeansClass {
  std::vector<double> members;
  double mean = 0.0;
  double variance = 0.0;
  double weight = 0.0;  // M_i / M
};

// Seeded k-means partition of 1-D samples into n non-empty classes.
// An emptied class is refilled with the farthest point of the largest
// class; if that fails repeatedly the error is EmptyClusterUnrecoverable.
std::vector<KmeansClass> kmeans_partition(std::span<const double> samples,
                                          int n, std::uint64_t seed);

// EM fit initialized from kmeans_partition. Deterministic for a fixed
// seed. Throws TooFewSamples / DegenerateComponent.
std::pair<Gmm, EmReport> em_fit(std::span<const double> samples, int n,
                                const EmOptions& opts = {},
                                bool keep_responsibilities = false);

double gmm_pdf(const Gmm& model, double x);
double gmm_cdf(const Gmm& model, double x);

double gaussian_pdf(double x, double mean, double variance);
double gaussian_cdf(double x, double mean, double variance);

}  // namespace freqsde
