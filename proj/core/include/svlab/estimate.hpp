#pragma once

// Monte Carlo summaries. Sums use a fixed pairwise tree so that results are
// reproducible bit for bit.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace svlab {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;

  /// |value| ≤ k·SE.
  bool within(double k, double target = 0.0) const;
  /// |value − target| / SE (infinite when SE = 0 and the difference is not).
  double z_score(double target = 0.0) const;
};

double pairwise_sum(std::span<const double> x);

/// Sample mean with SE = sample standard deviation / √n.
EstimateWithError estimate_mean(std::span<const double> x);
/// Mean of a[i] − b[i] (common random numbers).
EstimateWithError paired_difference(std::span<const double> a, std::span<const double> b);

double combined_se(double a, double b);

/// Kolmogorov–Smirnov distance between samples and Uniform[lo, hi).
double ks_uniform(std::vector<double> samples, double lo, double hi);
/// Asymptotic two-sided KS critical value c(α)/√n for α ∈ {0.05, 0.01, 0.001}.
double ks_critical(std::size_t n, double alpha = 0.05);

std::string to_string(const EstimateWithError& e);

}  // namespace svlab
