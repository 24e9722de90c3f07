#include "tstat/leading_terms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tstat/normal.hpp"
#include "tstat/parallel.hpp"
#include "tstat/quadrature.hpp"

namespace tstat {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Restriction to lo < |X| <= hi; lo == 0 keeps an atom at zero.
struct Band {
  double lo = 0.0;
  double hi = inf;
  bool contains(double x) const {
    const double a = std::fabs(x);
    return (a > lo || (lo == 0.0 && a == 0.0)) && a <= hi;
  }
};

// n E[g_x(X / scale); X in band] for every x in the grid. Discrete laws get
// the exact atom sum; continuous laws get adaptive quadrature split at the
// band edges and the extra breakpoints (b_n for the full-range terms), with
// symmetric laws folded onto the positive axis.
template <typename G>
std::vector<double> band_expectation(const Distribution& dist, std::int64_t n,
                                     double scale, Band band,
                                     std::vector<double> breaks,
                                     const std::vector<double>& grid, G&& g,
                                     double tol_per_x, int threads) {
  const double nn = static_cast<double>(n);
  std::vector<double> out(grid.size());

  if (dist.kind() == Kind::discrete) {
    struct W {
      double r, p;
    };
    std::vector<W> in_band;
    for (const Atom& a : dist.atoms())
      if (band.contains(a.x)) in_band.push_back({a.x / scale, a.p});
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
          const double x = grid[i];
          double s = 0.0;
          for (const W& w : in_band) s += w.p * g(x, w.r);
          out[i] = nn * s;
        },
        threads);
    return out;
  }

  // Positive-side segment list [p_k, p_{k+1}], last possibly infinite.
  // Density breaks must be segment endpoints or the quadrature can stall.
  std::vector<double> pts;
  pts.push_back(band.lo);
  for (double b : breaks)
    if (b > band.lo && b < band.hi) pts.push_back(b);
  for (double b : dist.density_breaks())
    if (b > band.lo && b < band.hi) pts.push_back(b);
  pts.push_back(band.hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const bool sym = dist.symmetric();
  const std::size_t nseg = (pts.size() - 1) * (sym ? 1 : 2);

  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        const double x = grid[i];
        const double tol = tol_per_x / (nn * static_cast<double>(nseg));
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
          const double s0 = pts[k], s1 = pts[k + 1];
          if (sym) {
            auto f = [&](double t) {
              const double r = t / scale;
              return (g(x, r) + g(x, -r)) * dist.density(t);
            };
            acc += (s1 == inf) ? integrate_upper_tail(f, s0, tol)
                               : integrate(f, s0, s1, tol);
          } else {
            auto fp = [&](double t) { return g(x, t / scale) * dist.density(t); };
            auto fm = [&](double t) { return g(x, -t / scale) * dist.density(-t); };
            if (s1 == inf) {
              acc += integrate_upper_tail(fp, s0, tol);
              acc += integrate_upper_tail(fm, s0, tol);
            } else {
              acc += integrate(fp, s0, s1, tol);
              acc += integrate(fm, s0, s1, tol);
            }
          }
        }
        out[i] = nn * acc;
      },
      threads);
  return out;
}

Curve make_curve(TermKind kind, const Distribution& dist,
                 const TruncationFunctionals& f, const std::vector<double>& grid,
                 std::vector<double> values, bool with_alpha) {
  Curve c;
  c.kind = kind;
  c.dist_name = dist.name();
  c.n = f.n;
  if (with_alpha) c.alpha = f.alpha;
  c.grid = grid;
  c.values = std::move(values);
  for (double v : c.values)
    if (!std::isfinite(v))
      throw QuadratureError(std::string(term_name(kind)) + ": non-finite value");
  return c;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("grid must be non-empty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("grid must be strictly increasing");
  for (double x : grid)
    if (!std::isfinite(x)) throw std::invalid_argument("grid must be finite");
}

double studentized_arg(double x, double r) {
  return x * std::sqrt(1.0 + r * r) - r;
}

}  // namespace

const char* term_name(TermKind k) {
  switch (k) {
    case TermKind::ln: return "ln";
    case TermKind::mn1: return "mn1";
    case TermKind::mn2: return "mn2";
    case TermKind::qn1: return "qn1";
    case TermKind::ln1: return "ln1";
    case TermKind::ln2: return "ln2";
    case TermKind::edgeworth_student: return "edgeworth_student";
    case TermKind::edgeworth_plain: return "edgeworth_plain";
    case TermKind::empirical_cdf: return "empirical_cdf";
  }
  return "?";
}

TermKind parse_term(const std::string& s) {
  for (TermKind k :
       {TermKind::ln, TermKind::mn1, TermKind::mn2, TermKind::qn1,
        TermKind::ln1, TermKind::ln2, TermKind::edgeworth_student,
        TermKind::edgeworth_plain, TermKind::empirical_cdf})
    if (s == term_name(k)) return k;
  throw std::invalid_argument("term: unknown name '" + s + "'");
}

std::vector<double> default_grid(double min, double max, double step,
                                 const std::vector<double>& extra) {
  if (!(step > 0.0) || !(min < max) || !std::isfinite(min) || !std::isfinite(max))
    throw std::invalid_argument("grid: need finite min < max and step > 0");
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>((max - min) / step) + 2 + extra.size());
  for (std::size_t i = 0;; ++i) {
    const double x = min + static_cast<double>(i) * step;
    if (x > max + 0.5 * step) break;
    g.push_back(std::min(x, max));
  }
  for (double e : extra) {
    if (!std::isfinite(e)) throw std::invalid_argument("grid: extra point not finite");
    g.push_back(e);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

Curve eval_ln(const Distribution& dist, const TruncationFunctionals& f,
              const std::vector<double>& grid, const CurveOptions& opts) {
  check_grid(grid);
  const double b = f.b_n;
  auto g = [b](double x, double r) {
    return normal_cdf(studentized_arg(x, r)) - normal_cdf(x);
  };
  const double tol = opts.tol_factor * opts.safety * f.delta_n;
  auto vals = band_expectation(dist, f.n, b, Band{0.0, inf}, {b}, grid, g, tol,
                               opts.threads);
  return make_curve(TermKind::ln, dist, f, grid, std::move(vals), false);
}

std::pair<Curve, Curve> eval_mn_split(const Distribution& dist,
                                      const TruncationFunctionals& f,
                                      const std::vector<double>& grid,
                                      const CurveOptions& opts) {
  check_grid(grid);
  const double b = f.b_n;
  const double ab = f.alpha * b;
  auto g = [](double x, double r) {
    return normal_cdf(studentized_arg(x, r)) - normal_cdf(x);
  };
  const double tol = 0.5 * opts.tol_factor * opts.safety * f.delta_n;
  auto v1 = band_expectation(dist, f.n, b, Band{ab, inf}, {b}, grid, g, tol,
                             opts.threads);
  auto v2 = band_expectation(dist, f.n, b, Band{0.0, ab}, {}, grid, g, tol,
                             opts.threads);
  return {make_curve(TermKind::mn1, dist, f, grid, std::move(v1), true),
          make_curve(TermKind::mn2, dist, f, grid, std::move(v2), true)};
}

Curve eval_qn1(const TruncationFunctionals& f, const std::string& dist_name,
               const std::vector<double>& grid) {
  check_grid(grid);
  Curve c;
  c.kind = TermKind::qn1;
  c.dist_name = dist_name;
  c.n = f.n;
  c.alpha = f.alpha;
  c.grid = grid;
  c.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double p = normal_pdf(x);
    c.values[i] = p * (-f.u[0] + f.u[2] * (2.0 * x * x + 1.0) / 6.0 +
                       f.u[3] * x * (x * x - 3.0) / 12.0);
  }
  return c;
}

namespace {

Curve eval_sum_term(TermKind kind, const Distribution& dist,
                    const TruncationFunctionals& f, double scale,
                    const std::vector<double>& grid, const CurveOptions& opts) {
  check_grid(grid);
  auto g = [](double x, double r) { return normal_cdf(x - r) - normal_cdf(x); };
  const double tol = opts.tol_factor * opts.safety * f.delta_n;
  auto vals = band_expectation(dist, f.n, scale, Band{0.0, inf}, {f.b_n}, grid,
                               g, tol, opts.threads);
  const double nn = static_cast<double>(f.n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    // - (n / 2 scale^2) phi'(x), with phi'(x) = -x phi(x)
    vals[i] += 0.5 * nn / (scale * scale) * x * normal_pdf(x);
  }
  return make_curve(kind, dist, f, grid, std::move(vals), false);
}

}  // namespace

Curve eval_ln1(const Distribution& dist, const TruncationFunctionals& f,
               const std::vector<double>& grid, const CurveOptions& opts) {
  return eval_sum_term(TermKind::ln1, dist, f, f.b_n, grid, opts);
}

Curve eval_ln2(const Distribution& dist, const TruncationFunctionals& f,
               const std::vector<double>& grid, const CurveOptions& opts) {
  const double s = std::sqrt(static_cast<double>(f.n) * f.sigma_n2);
  return eval_sum_term(TermKind::ln2, dist, f, s, grid, opts);
}

namespace {

Curve edgeworth_curve(TermKind kind, double gamma, std::int64_t n,
                      const std::vector<double>& grid) {
  check_grid(grid);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite");
  Curve c;
  c.kind = kind;
  c.n = n;
  c.grid = grid;
  c.values.resize(grid.size());
  const double a = gamma / (6.0 * std::sqrt(static_cast<double>(n)));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    c.values[i] = (kind == TermKind::edgeworth_student)
                      ? a * (2.0 * x * x + 1.0) * normal_pdf(x)
                      : -a * (x * x - 1.0) * normal_pdf(x);
  }
  return c;
}

}  // namespace

Curve eval_edgeworth_student(double gamma, std::int64_t n,
                             const std::vector<double>& grid) {
  return edgeworth_curve(TermKind::edgeworth_student, gamma, n, grid);
}

Curve eval_edgeworth_plain(double gamma, std::int64_t n,
                           const std::vector<double>& grid) {
  return edgeworth_curve(TermKind::edgeworth_plain, gamma, n, grid);
}

TaylorCheck taylor5_check(double x, double u) {
  if (!(std::fabs(u) <= 1.0))
    throw std::invalid_argument("taylor5_check requires |u| <= 1");
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  if (u == 0.0) return {0.0, 0.0};
  const long double xl = x, ul = u;
  const long double arg = xl * std::sqrt(1.0L + ul * ul) - ul;
  const long double poly =
      -ul + ul * ul * ul * (2.0L * xl * xl + 1.0L) / 6.0L +
      ul * ul * ul * ul * xl * (xl * xl - 3.0L) / 12.0L;
  const long double err =
      std::fabs(normal_cdf_l(arg) - (normal_cdf_l(xl) + poly * normal_pdf_l(xl)));
  const long double u5 = std::fabs(ul * ul * ul * ul * ul);
  return {static_cast<double>(err), static_cast<double>(err / u5)};
}

}  // namespace tstat
