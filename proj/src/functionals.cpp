#include "tstat/functionals.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tstat {

double truncation_radius(const Distribution& dist, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const double nn = static_cast<double>(n);

  // b_n = sup{x > 0 : n E[X^2 1(|X|<=x)] >= x^2}. The map
  // Phi(x) = sqrt(n E[X^2 1(|X|<=x)]) is nondecreasing, so starting above
  // the level set the iterates x <- Phi(x) fall monotonically onto its
  // supremum (the largest fixed point); when the set is empty they collapse
  // toward zero instead. This finds level sets a grid search would skip,
  // including ones that are a single tangency point.
  double x = std::sqrt(nn * dist.truncated_moment(2, 1e120));
  for (int it = 0; it < 500 && x > 1e-290; ++it) {
    if (nn * dist.truncated_moment(2, x) >= x * x) return x;
    const double next = std::sqrt(nn * dist.truncated_moment(2, x));
    if (next >= x) return x;  // rounding pinned us onto the boundary
    if (x - next <= 4e-16 * x) return next;
    x = next;
  }
  throw std::invalid_argument(dist.name() + ", n=" + std::to_string(n) +
                              ": level set {h >= 1} is empty, b_n undefined");
}

TruncationFunctionals compute_functionals(const Distribution& dist, std::int64_t n,
                                          double alpha) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1]");

  TruncationFunctionals f;
  f.n = n;
  f.alpha = alpha;
  f.b_n = truncation_radius(dist, n);

  const double b = f.b_n;
  const double nn = static_cast<double>(n);
  f.d1 = nn * dist.tail(b);
  f.d2 = nn / b * std::fabs(dist.truncated_moment(1, b));
  f.d3 = nn / (b * b * b) * std::fabs(dist.truncated_moment(3, b));
  f.d4 = nn / (b * b * b * b) * dist.truncated_moment(4, b);
  f.delta_n = f.d1 + f.d2 + f.d3 + f.d4;

  const double ab = alpha * b;
  f.nu = dist.truncated_moment(1, ab);
  f.tau2 = dist.truncated_moment(2, ab);
  f.sigma_n2 = dist.truncated_moment(2, b);
  f.B_n2 = nn * f.tau2;
  f.rho_n = nn * dist.tail(ab);

  const double B = std::sqrt(f.B_n2);
  double scale = 1.0;
  for (int j = 1; j <= 4; ++j) {
    scale = B > 0.0 ? scale / B : 0.0;
    const double m = dist.truncated_moment(j, ab);
    // empty inner truncation: the expectation is 0, not 0/0
    f.u[j - 1] = m == 0.0 ? 0.0 : nn * m * scale;
  }
  return f;
}

}  // namespace tstat
