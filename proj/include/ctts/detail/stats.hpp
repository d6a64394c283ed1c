#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

namespace ctts::detail {

// Linear-interpolation quantile on sorted data (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (sorted.size() == 1) return sorted.front();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided p-value for a standard-normal statistic; erfc avoids the
// cancellation in 2 * (1 - Phi(|z|)).
inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// Upper (1 + level) / 2 standard-normal quantile.
inline double two_sided_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
  if (level == 0.90) return 1.6448536269514722;
  if (level == 0.95) return 1.959963984540054;
  if (level == 0.99) return 2.5758293035489004;
  return std::sqrt(2.0) * boost::math::erfc_inv(1.0 - level);
}

}  // namespace ctts::detail
