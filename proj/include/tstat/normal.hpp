#pragma once

#include <cmath>

// Standard normal density, distribution function and derivatives.
// Phi is routed through erfc so that both tails keep full relative accuracy;
// a naive 0.5*(1+erf(.)) loses everything past x ~ -6.

namespace tstat {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
inline constexpr double inv_sqrt_2 = 0.7071067811865475244008444;

inline double normal_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt_2); }

// P(Z > x), accurate in the upper tail
inline double normal_tail(double x) { return 0.5 * std::erfc(x * inv_sqrt_2); }

// d/dx phi(x) = -x phi(x)
inline double normal_pdf_deriv(double x) { return -x * normal_pdf(x); }

// Extended-precision variants used where a difference of nearby CDF values
// would otherwise drown in double rounding (Taylor remainder scans).
inline long double normal_pdf_l(long double x) {
  return 0.398942280401432677939946059934381868L * std::exp(-0.5L * x * x);
}

inline long double normal_cdf_l(long double x) {
  return 0.5L * std::erfc(-x * 0.707106781186547524400844362104849039L);
}

}  // namespace tstat
