#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tstat/distributions.hpp"
#include "tstat/functionals.hpp"

namespace tstat {

// Correction terms evaluated on a grid of x values.
//
//   ln    n E[Phi(x sqrt(1+(X/b)^2) - X/b) - Phi(x)], b = b_n
//   mn1   the same expectation restricted to |X| >  alpha b
//   mn2   the same expectation restricted to |X| <= alpha b (mn1+mn2 = ln)
//   qn1   phi(x) (-u1 + u3 (2x^2+1)/6 + u4 x(x^2-3)/12)
//   ln1   n E[Phi(x - X/b) - Phi(x)] + n b^-2 x phi(x)/2
//   ln2   ln1 with b replaced by sqrt(n) sigma_n throughout
//   edgeworth_student  gamma (2x^2+1) phi(x) / (6 sqrt n)
//   edgeworth_plain   -gamma (x^2-1)  phi(x) / (6 sqrt n)
enum class TermKind {
  ln,
  mn1,
  mn2,
  qn1,
  ln1,
  ln2,
  edgeworth_student,
  edgeworth_plain,
  empirical_cdf,
};

const char* term_name(TermKind k);
// Inverse of term_name; throws std::invalid_argument for unknown names.
TermKind parse_term(const std::string& s);

struct Curve {
  TermKind kind = TermKind::ln;
  std::string dist_name;
  std::int64_t n = 0;
  std::optional<double> alpha;
  std::vector<double> grid;
  std::vector<double> values;
};

struct CurveOptions {
  // Quadrature budget: the curve error target is tol_factor * delta_n, spread
  // as tol_factor * delta_n / n per expectation; safety shrinks the target
  // handed to the integrator so the bound holds with slack.
  double tol_factor = 1e-3;
  double safety = 0.05;
  int threads = 0;
};

// x values min, min+step, ..., up to max, plus any extra points, sorted and
// deduplicated.
std::vector<double> default_grid(double min = -10.0, double max = 10.0,
                                 double step = 0.005,
                                 const std::vector<double>& extra = {});

Curve eval_ln(const Distribution& dist, const TruncationFunctionals& f,
              const std::vector<double>& grid, const CurveOptions& opts = {});

// Returns {mn1, mn2}; their pointwise sum reproduces eval_ln up to twice the
// quadrature tolerance (exactly, for discrete laws).
std::pair<Curve, Curve> eval_mn_split(const Distribution& dist,
                                      const TruncationFunctionals& f,
                                      const std::vector<double>& grid,
                                      const CurveOptions& opts = {});

Curve eval_qn1(const TruncationFunctionals& f, const std::string& dist_name,
               const std::vector<double>& grid);

Curve eval_ln1(const Distribution& dist, const TruncationFunctionals& f,
               const std::vector<double>& grid, const CurveOptions& opts = {});

Curve eval_ln2(const Distribution& dist, const TruncationFunctionals& f,
               const std::vector<double>& grid, const CurveOptions& opts = {});

// gamma is E[X^3]; callers must scale the law to E[X^2] = 1 for the limit to
// mean anything.
Curve eval_edgeworth_student(double gamma, std::int64_t n,
                             const std::vector<double>& grid);
Curve eval_edgeworth_plain(double gamma, std::int64_t n,
                           const std::vector<double>& grid);

// Fifth-order Taylor remainder of Phi(x sqrt(1+u^2) - u) around u = 0:
// approx_error = |Phi(...) - Phi(x) - {-u + u^3(2x^2+1)/6 + u^4 x(x^2-3)/12} phi(x)|
// bound_ratio  = approx_error / |u|^5 (0 at u = 0).
// Evaluated in extended precision; requires |u| <= 1.
struct TaylorCheck {
  double approx_error;
  double bound_ratio;
};
TaylorCheck taylor5_check(double x, double u);

}  // namespace tstat
