#include "svlab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace svlab {

bool EstimateWithError::within(double k, double target) const {
  return std::abs(value - target) <= k * std_error;
}

double EstimateWithError::z_score(double target) const {
  const double d = std::abs(value - target);
  if (std_error > 0.0) return d / std_error;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

EstimateWithError estimate_mean(std::span<const double> x) {
  EstimateWithError e;
  e.n = x.size();
  if (x.empty()) return e;
  e.value = pairwise_sum(x) / double(x.size());
  if (x.size() < 2) return e;
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - e.value) * (x[i] - e.value);
  const double var = pairwise_sum(dev) / double(x.size() - 1);
  e.std_error = std::sqrt(var / double(x.size()));
  return e;
}

EstimateWithError paired_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples must have equal size");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return estimate_mean(d);
}

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

double ks_uniform(std::vector<double> samples, double lo, double hi) {
  if (samples.empty()) throw std::invalid_argument("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, (double(i) + 1.0) / n - f, f - double(i) / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  double c;
  if (alpha >= 0.05) c = 1.358;
  else if (alpha >= 0.01) c = 1.628;
  else c = 1.949;
  return c / std::sqrt(double(n));
}

std::string to_string(const EstimateWithError& e) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g +/- %.3g (n=%zu)", e.value, e.std_error, e.n);
  return buf;
}

}  // namespace svlab
