#pragma once

#include <array>
#include <cstdint>

#include "tstat/distributions.hpp"

namespace tstat {

// Everything the correction terms need from (law, n, alpha), computed once.
//
//   b_n      largest x with n x^-2 E[X^2 1(|X|<=x)] >= 1
//   d1..d4   the four components of the rate functional:
//            n P(|X|>b_n), n b^-1 |E X 1|, n b^-3 |E X^3 1|, n b^-4 E X^4 1,
//            all truncated at b_n; delta_n is their sum
//   nu,tau2  first and second moments truncated at alpha*b_n
//   sigma_n2 second moment truncated at b_n
//   B_n2     n * tau2
//   rho_n    n P(|X| > alpha*b_n)
//   u[j-1]   n E[(X/B_n)^j 1(|X|<=alpha*b_n)], j = 1..4
struct TruncationFunctionals {
  std::int64_t n = 0;
  double alpha = 0.25;
  double b_n = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
  double delta_n = 0.0;
  double nu = 0.0;
  double tau2 = 0.0;
  double sigma_n2 = 0.0;
  double B_n2 = 0.0;
  double rho_n = 0.0;
  std::array<double, 4> u = {0.0, 0.0, 0.0, 0.0};
};

inline constexpr double default_alpha = 0.25;

// Truncation radius b_n. Expands a dyadic bracket, takes the last
// down-crossing of h(x) = n x^-2 E[X^2 1(|X|<=x)] through 1, bisects it to
// machine width, and verifies h < 1 on a geometric grid above the root.
// Throws std::invalid_argument when no x with h(x) >= 1 exists.
double truncation_radius(const Distribution& dist, std::int64_t n);

TruncationFunctionals compute_functionals(const Distribution& dist, std::int64_t n,
                                          double alpha = default_alpha);

}  // namespace tstat
