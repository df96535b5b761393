#ifndef SSHNET_DIAGNOSTICS_HPP_
#define SSHNET_DIAGNOSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sshnet {

// Linear-interpolated quantile (type 7) of an unsorted sample.
inline double quantile(std::vector<double> x, double prob) {
  if (x.empty()) return NAN;
  std::sort(x.begin(), x.end());
  const double h = prob * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

// Effective sample size with Geyer's initial positive sequence estimator.
inline double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0) return static_cast<double>(n);

  auto autocorr = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    return s / (static_cast<double>(n) * var);
  };

  double sum_pairs = 0.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = autocorr(lag) + autocorr(lag + 1);
    if (pair <= 0.0) break;
    sum_pairs += pair;
  }
  const double tau = std::max(1.0, 2.0 * sum_pairs - 1.0);
  return static_cast<double>(n) / tau;
}

}  // namespace sshnet

#endif  // SSHNET_DIAGNOSTICS_HPP_
