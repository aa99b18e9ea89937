#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace neuroevo {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// log Phi(z), finite for every finite z. Below z = -8 the complementary error
// function is replaced by the asymptotic Mills-ratio series
//   Phi(z) ~ phi(z)/|z| * sum_k (-1)^k (2k-1)!! / z^(2k)
// summed until its terms stop shrinking.
inline double log_normal_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z == std::numeric_limits<double>::infinity()) return 0.0;
  if (z == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  if (z > 6.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z >= -8.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));

  const double inv_z2 = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = -term * static_cast<double>(2 * k - 1) * inv_z2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(sum);
}

// log(Phi(b) - Phi(a)) for a <= b, choosing the tail that avoids cancellation.
inline double log_normal_interval(double a, double b) {
  if (!(a < b)) return -std::numeric_limits<double>::infinity();
  if (b <= 0.0) {
    const double lb = log_normal_cdf(b);
    return lb + std::log1p(-std::exp(log_normal_cdf(a) - lb));
  }
  if (a >= 0.0) {
    const double la = log_normal_cdf(-a);
    return la + std::log1p(-std::exp(log_normal_cdf(-b) - la));
  }
  return std::log1p(-(normal_cdf(a) + normal_cdf(-b)));
}

}  // namespace neuroevo
