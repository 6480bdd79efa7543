#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace parplay {

/// Normalizes exp(log_weights) with max-subtraction. Non-finite entries get zero
/// mass; if no entry is finite the result is uniform.
inline std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  const std::size_t n = log_weights.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  double peak = -std::numeric_limits<double>::infinity();
  for (double w : log_weights)
    if (std::isfinite(w)) peak = std::max(peak, w);
  if (!std::isfinite(peak)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = log_weights[i];
    out[i] = std::isfinite(w) ? std::exp(w - peak) : 0.0;
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

/// Normalizes non-negative weights; all-zero input falls back to uniform.
inline std::vector<double> normalize_weights(std::span<const double> weights) {
  std::vector<double> out(weights.begin(), weights.end());
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (out.empty()) return out;
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return out;
  }
  for (double& p : out) p /= total;
  return out;
}

inline std::vector<double> uniform(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace parplay
