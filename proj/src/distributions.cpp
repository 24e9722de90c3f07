#include "tstat/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tstat/normal.hpp"
#include "tstat/quadrature.hpp"
#include "tstat/rng.hpp"

namespace tstat {

namespace {

constexpr double moment_tol_unit = 1e-15;

void check_radius(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("truncation radius must be a positive finite real");
}

void check_order(int j) {
  if (j < 0 || j > 8) throw std::invalid_argument("moment order must be in 0..8");
}

double pow_int(double x, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= x;
  return r;
}

}  // namespace

Distribution::Distribution(std::string name, std::vector<double> params, Kind kind,
                           bool symmetric, bool finite_variance,
                           std::optional<double> third_moment, Interval support,
                           std::vector<Atom> atoms)
    : name_(std::move(name)),
      params_(std::move(params)),
      kind_(kind),
      symmetric_(symmetric),
      finite_variance_(finite_variance),
      third_moment_(third_moment),
      support_(support),
      atoms_(std::move(atoms)) {}

double Distribution::density(double) const {
  throw std::logic_error(name_ + ": density undefined for a discrete law");
}

std::optional<double> Distribution::truncated_moment_closed(int, double) const {
  return std::nullopt;
}

double Distribution::truncated_moment(int j, double c) const {
  check_order(j);
  check_radius(c);
  if (kind_ == Kind::discrete) {
    double s = 0.0;
    for (const Atom& a : atoms_)
      if (std::fabs(a.x) <= c) s += a.p * pow_int(a.x, j);
    return s;
  }
  if (symmetric_ && (j % 2 == 1)) return 0.0;
  if (auto closed = truncated_moment_closed(j, c)) return *closed;
  return truncated_moment_numeric(j, c);
}

double Distribution::truncated_moment_numeric(int j, double c) const {
  check_order(j);
  check_radius(c);
  if (kind_ == Kind::discrete)
    throw std::logic_error(name_ + ": no quadrature route for a discrete law");
  const double tol = moment_tol_unit * std::max(1.0, pow_int(c, j));
  auto h = [j](double x) { return pow_int(x, j); };
  if (symmetric_) {
    if (j % 2 == 1) return 0.0;
    return 2.0 * expect(h, 0.0, c, 0.5 * tol);
  }
  return expect(h, -c, c, tol);
}

double Distribution::tail(double c) const {
  check_radius(c);
  if (kind_ == Kind::discrete) {
    double s = 0.0;
    for (const Atom& a : atoms_)
      if (std::fabs(a.x) > c) s += a.p;
    return s;
  }
  return 1.0 - truncated_moment(0, c);
}

std::vector<double> Distribution::density_breaks() const {
  std::vector<double> out;
  for (double e : {support_.lo, support_.hi})
    if (std::isfinite(e) && e != 0.0) out.push_back(std::fabs(e));
  return out;
}

double Distribution::expect(const std::function<double(double)>& h, double lo,
                            double hi, double abs_tol) const {
  if (kind_ == Kind::discrete)
    throw std::logic_error(name_ + ": expect() is for continuous laws");
  lo = std::max(lo, support_.lo);
  hi = std::min(hi, support_.hi);
  if (!(lo < hi)) return 0.0;
  auto f = [this, &h](double x) { return h(x) * density(x); };

  // Chop the finite part at dyadic magnitudes so that a wide interval with
  // localized mass cannot alias to zero under a single quadrature pass, cut
  // at every density break, and map infinite ends through t = 1/s.
  std::vector<double> cuts;
  double a = lo, b = hi;
  bool tail_lo = std::isinf(lo), tail_hi = std::isinf(hi);
  if (tail_lo) a = std::min(-1.0, hi);
  if (tail_hi) b = std::max(1.0, lo);
  cuts.push_back(a);
  for (int k = -6; k <= 64; ++k) {
    const double m = std::ldexp(1.0, k);
    if (-m > a && -m < b) cuts.push_back(-m);
    if (m > a && m < b) cuts.push_back(m);
  }
  for (double r : density_breaks()) {
    if (r > a && r < b) cuts.push_back(r);
    if (-r > a && -r < b) cuts.push_back(-r);
  }
  if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t pieces =
      (cuts.size() - 1) + (tail_lo ? 1 : 0) + (tail_hi ? 1 : 0);
  const double tol = abs_tol / static_cast<double>(pieces);

  double total = 0.0;
  if (tail_lo)
    total += integrate_upper_tail([&f](double t) { return f(-t); }, -a, tol);
  if (tail_hi) total += integrate_upper_tail(f, b, tol);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f, cuts[i], cuts[i + 1], tol);
  return total;
}

std::vector<double> Distribution::sample(std::size_t count, std::uint64_t seed) const {
  if (count == 0) throw std::invalid_argument("sample count must be >= 1");
  std::mt19937_64 eng(mix_seed(seed, 0));
  std::vector<double> out(count);
  for (auto& v : out) v = quantile(uniform_open(eng));
  return out;
}

namespace {

/* ---------- discrete laws ---------- */

class DiscreteDistribution final : public Distribution {
 public:
  DiscreteDistribution(std::string name, std::vector<Atom> atoms)
      : Distribution(std::move(name), {}, Kind::discrete,
                     detect_symmetry(atoms), true, gamma_of(atoms),
                     support_of(atoms), sorted(atoms)) {
    double mass = 0.0;
    for (const Atom& a : atoms_) {
      if (!(a.p >= 0.0)) throw std::invalid_argument("atom probability < 0");
      mass += a.p;
    }
    if (std::fabs(mass - 1.0) > 1e-12)
      throw std::invalid_argument("atom probabilities must sum to 1");
  }

  double cdf(double x) const override {
    double s = 0.0;
    for (const Atom& a : atoms_)
      if (a.x <= x) s += a.p;
    return s;
  }

  double quantile(double u) const override {
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile argument must lie in (0,1)");
    double cum = 0.0;
    for (const Atom& a : atoms_) {
      cum += a.p;
      if (u <= cum) return a.x;
    }
    return atoms_.back().x;
  }

 private:
  static std::vector<Atom> sorted(std::vector<Atom> a) {
    std::sort(a.begin(), a.end(),
              [](const Atom& l, const Atom& r) { return l.x < r.x; });
    return a;
  }
  static Interval support_of(const std::vector<Atom>& a) {
    double lo = a.front().x, hi = a.front().x;
    for (const Atom& at : a) {
      lo = std::min(lo, at.x);
      hi = std::max(hi, at.x);
    }
    return {lo, hi};
  }
  static std::optional<double> gamma_of(const std::vector<Atom>& a) {
    double g = 0.0;
    for (const Atom& at : a) g += at.p * at.x * at.x * at.x;
    return g;
  }
  static bool detect_symmetry(std::vector<Atom> a) {
    std::sort(a.begin(), a.end(),
              [](const Atom& l, const Atom& r) { return l.x < r.x; });
    std::size_t i = 0, j = a.size() - 1;
    while (i < j) {
      if (std::fabs(a[i].x + a[j].x) > 0.0 || a[i].p != a[j].p) return false;
      ++i;
      --j;
    }
    if (i == j && a[i].x != 0.0) return false;
    return true;
  }
};

/* ---------- uniform on [-s, s] ---------- */

class UniformSymmetric final : public Distribution {
 public:
  explicit UniformSymmetric(double s)
      : Distribution("uniform", {s}, Kind::continuous, true, true, 0.0,
                     {-s, s}),
        s_(s) {}

  double density(double x) const override {
    return std::fabs(x) <= s_ ? 0.5 / s_ : 0.0;
  }
  double cdf(double x) const override {
    if (x <= -s_) return 0.0;
    if (x >= s_) return 1.0;
    return 0.5 * (x / s_ + 1.0);
  }
  double quantile(double u) const override {
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile argument must lie in (0,1)");
    return s_ * (2.0 * u - 1.0);
  }
  double tail(double c) const override {
    check_radius(c);
    return c >= s_ ? 0.0 : 1.0 - c / s_;
  }

 protected:
  std::optional<double> truncated_moment_closed(int j, double c) const override {
    if (j % 2 == 1) return 0.0;
    const double m = std::min(c, s_);
    return pow_int(m, j + 1) / (s_ * (j + 1));
  }

 private:
  double s_;
};

/* ---------- exponential shifted to mean zero ---------- */

// X = E - 1 with E ~ Exp(1): density e^{-(x+1)} on [-1, inf).
class CenteredExponential final : public Distribution {
 public:
  CenteredExponential()
      : Distribution("centered-exponential", {}, Kind::continuous, false, true,
                     2.0, {-1.0, std::numeric_limits<double>::infinity()}) {}

  double density(double x) const override {
    return x >= -1.0 ? std::exp(-(x + 1.0)) : 0.0;
  }
  double cdf(double x) const override {
    return x >= -1.0 ? -std::expm1(-(x + 1.0)) : 0.0;
  }
  double quantile(double u) const override {
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile argument must lie in (0,1)");
    return -std::log1p(-u) - 1.0;
  }
  double tail(double c) const override {
    check_radius(c);
    double t = std::exp(-(1.0 + c));
    if (c < 1.0) t += -std::expm1(-(1.0 - c));
    return t;
  }

 protected:
  std::optional<double> truncated_moment_closed(int j, double c) const override {
    // With t = x+1 ~ Exp(1): E[X^j 1(|X|<=c)] = ∫ (t-1)^j e^-t dt over
    // [max(0, 1-c), 1+c], expanded binomially; each ∫ t^k e^-t dt is exact.
    const double a = std::max(0.0, 1.0 - c);
    const double b = 1.0 + c;
    double sum = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= j; ++k) {
      const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * binom * (gamma_piece(k, a) - gamma_piece(k, b));
      binom = binom * (j - k) / (k + 1);
    }
    return sum;
  }

 private:
  // F_k(x) = e^{-x} * sum_{m<=k} (k!/m!) x^m, an antiderivative of -t^k e^-t.
  static double gamma_piece(int k, double x) {
    double kfact = 1.0;
    for (int m = 2; m <= k; ++m) kfact *= m;
    double acc = 0.0;
    double xp = 1.0;      // x^m
    double coef = kfact;  // k!/m!
    for (int m = 0; m <= k; ++m) {
      acc += coef * xp;
      xp *= x;
      coef /= (m + 1.0);
    }
    return std::exp(-x) * acc;
  }
};

/* ---------- Student t, nu in {3, 5} ---------- */

class StudentT final : public Distribution {
 public:
  explicit StudentT(int nu)
      : Distribution("student-t" + std::to_string(nu), {double(nu)},
                     Kind::continuous, true, true,
                     nu > 3 ? std::optional<double>(0.0) : std::nullopt,
                     {-std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()}),
        nu_(nu) {
    if (nu != 3 && nu != 5) throw std::invalid_argument("nu must be 3 or 5");
    norm_ = (nu_ == 3) ? 2.0 / (pi_ * std::sqrt(3.0))
                       : 8.0 / (3.0 * pi_ * std::sqrt(5.0));
  }

  double density(double x) const override {
    const double q = 1.0 + x * x / nu_;
    const double p = (nu_ == 3) ? q * q : q * q * q;
    return norm_ / p;
  }

  double cdf(double x) const override {
    const double u = x / std::sqrt(double(nu_));
    const double w = 1.0 + u * u;
    if (nu_ == 3)
      return 0.5 + (std::atan(u) + u / w) / pi_;
    return 0.5 + (std::atan(u) + u / w + 2.0 * u / (3.0 * w * w)) / pi_;
  }

  double quantile(double u) const override {
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile argument must lie in (0,1)");
    if (u == 0.5) return 0.0;
    // Symmetric reduction to the upper half, bracketed Newton on the CDF.
    const bool flip = u < 0.5;
    const double p = flip ? 1.0 - u : u;
    double lo = 0.0, hi = 2.0;
    while (cdf(hi) < p) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e150) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double err = cdf(x) - p;
      if (err > 0.0)
        hi = x;
      else
        lo = x;
      const double step = err / std::max(density(x), 1e-300);
      double nx = x - step;
      if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
      if (std::fabs(nx - x) <= 1e-16 * std::max(1.0, std::fabs(x))) {
        x = nx;
        break;
      }
      x = nx;
    }
    return flip ? -x : x;
  }

 private:
  static constexpr double pi_ = 3.14159265358979323846264338327950288;
  int nu_;
  double norm_;
};

/* ---------- symmetric density |x|^-3 on |x| >= 1 ---------- */

class ParetoTail final : public Distribution {
 public:
  ParetoTail()
      : Distribution("pareto-tail", {}, Kind::continuous, true, false,
                     std::nullopt,
                     {-std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()}) {}

  double density(double x) const override {
    const double a = std::fabs(x);
    return a >= 1.0 ? 1.0 / (a * a * a) : 0.0;
  }
  double cdf(double x) const override {
    if (x <= -1.0) return 0.5 / (x * x);
    if (x < 1.0) return 0.5;
    return 1.0 - 0.5 / (x * x);
  }
  double quantile(double u) const override {
    if (!(u > 0.0 && u < 1.0))
      throw std::invalid_argument("quantile argument must lie in (0,1)");
    if (u <= 0.5) return -1.0 / std::sqrt(2.0 * u);
    return 1.0 / std::sqrt(2.0 * (1.0 - u));
  }
  double tail(double c) const override {
    check_radius(c);
    return c >= 1.0 ? 1.0 / (c * c) : 1.0;
  }
  std::vector<double> density_breaks() const override { return {1.0}; }

 protected:
  std::optional<double> truncated_moment_closed(int j, double c) const override {
    if (j % 2 == 1) return 0.0;
    if (c < 1.0) return 0.0;
    if (j == 2) return 2.0 * std::log(c);
    // 2 * ∫_1^c t^{j-3} dt = 2 (c^{j-2} - 1)/(j-2), j even, j != 2
    if (j == 0) return 1.0 - 1.0 / (c * c);
    return 2.0 * (pow_int(c, j - 2) - 1.0) / (j - 2);
  }
};

/* ---------- scaled wrapper ---------- */

class ScaledDistribution final : public Distribution {
 public:
  ScaledDistribution(DistPtr base, double c)
      : Distribution(base->name() + "*" + std::to_string(c), {c}, base->kind(),
                     base->symmetric(), base->has_finite_variance(),
                     scale_gamma(base, c),
                     {base->support().lo * c, base->support().hi * c},
                     scale_atoms(base, c)),
        base_(std::move(base)),
        c_(c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("scale must be a positive finite real");
  }

  double density(double x) const override { return base_->density(x / c_) / c_; }
  double cdf(double x) const override { return base_->cdf(x / c_); }
  double quantile(double u) const override { return c_ * base_->quantile(u); }
  double tail(double c) const override {
    check_radius(c);
    return base_->tail(c / c_);
  }
  std::vector<double> density_breaks() const override {
    std::vector<double> out = base_->density_breaks();
    for (double& r : out) r *= c_;
    return out;
  }

 protected:
  std::optional<double> truncated_moment_closed(int j, double c) const override {
    return pow_int(c_, j) * base_->truncated_moment(j, c / c_);
  }

 private:
  static std::optional<double> scale_gamma(const DistPtr& b, double c) {
    if (auto g = b->third_moment()) return *g * c * c * c;
    return std::nullopt;
  }
  static std::vector<Atom> scale_atoms(const DistPtr& b, double c) {
    std::vector<Atom> out = b->atoms();
    for (Atom& a : out) a.x *= c;
    return out;
  }

  DistPtr base_;
  double c_;
};

}  // namespace

DistPtr make_discrete(std::string name, std::vector<Atom> atoms) {
  return std::make_shared<DiscreteDistribution>(std::move(name), std::move(atoms));
}

DistPtr make_scaled(DistPtr base, double scale) {
  return std::make_shared<ScaledDistribution>(std::move(base), scale);
}

const std::vector<DistPtr>& catalog() {
  static const std::vector<DistPtr> cat = [] {
    std::vector<DistPtr> v;
    v.push_back(make_discrete("rademacher", {{-1.0, 0.5}, {1.0, 0.5}}));
    v.push_back(make_discrete("three-point", {{-1.0, 0.4}, {0.0, 0.4}, {2.0, 0.2}}));
    v.push_back(std::make_shared<UniformSymmetric>(std::sqrt(3.0)));
    v.push_back(std::make_shared<CenteredExponential>());
    v.push_back(std::make_shared<StudentT>(3));
    v.push_back(std::make_shared<StudentT>(5));
    v.push_back(std::make_shared<ParetoTail>());
    return v;
  }();
  return cat;
}

DistPtr find_distribution(const std::string& name) {
  for (const DistPtr& d : catalog())
    if (d->name() == name) return d;
  throw std::invalid_argument("distribution: unknown name '" + name + "'");
}

}  // namespace tstat
