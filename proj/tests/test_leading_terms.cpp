#include <doctest.h>

#include <cmath>
#include <vector>

#include "tstat/distributions.hpp"
#include "tstat/functionals.hpp"
#include "tstat/leading_terms.hpp"

using namespace tstat;

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }
double phi(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

}  // namespace

TEST_CASE("term names round-trip and reject junk") {
  for (TermKind k : {TermKind::ln, TermKind::mn1, TermKind::mn2, TermKind::qn1,
                     TermKind::ln1, TermKind::ln2, TermKind::edgeworth_student,
                     TermKind::edgeworth_plain, TermKind::empirical_cdf})
    CHECK(parse_term(term_name(k)) == k);
  CHECK_THROWS_AS(parse_term("l_n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_term(""), std::invalid_argument);
}

TEST_CASE("default grid covers the range, hits the ends and dedupes extras") {
  const auto g = default_grid(-1.0, 1.0, 0.25, {0.5, 0.3, -1.0});
  REQUIRE(g.size() == 10);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(std::count(g.begin(), g.end(), 0.3) == 1);
}

TEST_CASE("correction for a symmetric two-point law matches hand arithmetic") {
  // b = sqrt(n), X/b = +-1/2 at n = 4, so at x = 1 the correction is
  // 2 (Phi(sqrt(5)/2 - 1/2) + Phi(sqrt(5)/2 + 1/2) - 2 Phi(1))
  auto rad = find_distribution("rademacher");
  const auto f = compute_functionals(*rad, 4);
  const std::vector<double> grid = {1.0};
  const auto c = eval_ln(*rad, f, grid);
  CHECK(c.values[0] ==
        doctest::Approx(-0.0075871912938829697).epsilon(1e-12));
}

TEST_CASE("correction vanishes at the origin for symmetric laws") {
  for (const char* name : {"rademacher", "uniform", "student-t5", "pareto-tail"}) {
    auto d = find_distribution(name);
    const auto f = compute_functionals(*d, 50);
    const auto c = eval_ln(*d, f, {0.0});
    CHECK(std::fabs(c.values[0]) <= 1e-3 * f.delta_n);
  }
}

TEST_CASE("correction decays at the edges of the default grid") {
  for (const auto& d : catalog()) {
    const auto f = compute_functionals(*d, 100);
    const auto c = eval_ln(*d, f, {-10.0, 10.0});
    CHECK(std::fabs(c.values[0]) <= 1e-2 * f.delta_n);
    CHECK(std::fabs(c.values[1]) <= 1e-2 * f.delta_n);
  }
}

TEST_CASE("tail/body split adds back to the whole correction") {
  auto pareto = find_distribution("pareto-tail");
  const auto f = compute_functionals(*pareto, 100, 0.25);
  const auto grid = default_grid(-10.0, 10.0, 0.1);
  const auto whole = eval_ln(*pareto, f, grid);
  const auto parts = eval_mn_split(*pareto, f, grid);
  CHECK(parts.first.alpha == 0.25);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double sum = parts.first.values[i] + parts.second.values[i];
    CHECK(std::fabs(sum - whole.values[i]) <= 2e-3 * f.delta_n);
  }
}

TEST_CASE("tail part is identically zero when nothing crosses the cut") {
  // rademacher atoms sit at |x| = 1 < alpha b, so the tail band is empty
  auto rad = find_distribution("rademacher");
  const auto f = compute_functionals(*rad, 16, 1.0);
  const auto grid = default_grid(-3.0, 3.0, 0.5);
  const auto whole = eval_ln(*rad, f, grid);
  const auto parts = eval_mn_split(*rad, f, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(parts.first.values[i] == 0.0);
    CHECK(parts.second.values[i] == whole.values[i]);
  }
}

TEST_CASE("moment polynomial reduces to x(x^2-3) for a two-point law") {
  // u1 = u3 = 0 and u4 = 1/n, so the polynomial term has roots 0, +-sqrt(3)
  auto rad = find_distribution("rademacher");
  const auto f = compute_functionals(*rad, 25, 1.0);
  const double r3 = std::sqrt(3.0);
  const std::vector<double> grid = {-r3, 0.0, 1.0, r3, 2.0};
  const auto q = eval_qn1(f, rad->name(), grid);
  CHECK(std::fabs(q.values[0]) <= 1e-16);
  CHECK(q.values[1] == 0.0);
  CHECK(std::fabs(q.values[3]) <= 1e-16);
  CHECK(q.values[2] ==
        doctest::Approx(phi(1.0) * (1.0 - 3.0) / (12.0 * 25.0)).epsilon(1e-13));
  CHECK(q.values[4] ==
        doctest::Approx(phi(2.0) * 2.0 * (4.0 - 3.0) / (12.0 * 25.0)).epsilon(1e-13));
}

TEST_CASE("moment polynomial matches an independent moment chain") {
  // closed truncated moments of X = E - 1, derived by expanding (t-1)^j
  auto d = find_distribution("centered-exponential");
  const std::int64_t n = 1000;
  const double alpha = 0.25;
  const auto f = compute_functionals(*d, n, alpha);
  const double a = 1.0 + alpha * f.b_n;  // integration endpoint in t = x + 1
  const double ea = std::exp(-a);
  const double m1 = -a * ea;
  const double m2 = 1.0 - ea * (a * a + 1.0);
  const double m3 = 2.0 - ea * (a * a * a + 3.0 * a + 2.0);
  const double m4 = 9.0 - ea * (a * a * a * a + 6.0 * a * a + 8.0 * a + 9.0);
  const double B = std::sqrt(double(n) * m2);
  const double u1 = double(n) * m1 / B;
  const double u3 = double(n) * m3 / (B * B * B);
  const double u4 = double(n) * m4 / (B * B * B * B);

  CHECK(f.u[0] == doctest::Approx(u1).epsilon(1e-12));
  CHECK(f.u[2] == doctest::Approx(u3).epsilon(1e-12));
  CHECK(f.u[3] == doctest::Approx(u4).epsilon(1e-12));

  const std::vector<double> grid = {-1.5, 0.0, 0.8, 2.0};
  const auto q = eval_qn1(f, d->name(), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double want =
        phi(x) * (-u1 + u3 * (2.0 * x * x + 1.0) / 6.0 +
                  u4 * x * (x * x - 3.0) / 12.0);
    CHECK(q.values[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("plain-sum correction matches its two-atom closed form") {
  auto rad = find_distribution("rademacher");
  const std::int64_t n = 36;
  const auto f = compute_functionals(*rad, n);
  const std::vector<double> grid = {-2.0, -0.4, 0.0, 1.0, 3.1};
  const auto c = eval_ln1(*rad, f, grid);
  const double b = f.b_n;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double want =
        double(n) * (0.5 * (Phi(x - 1.0 / b) + Phi(x + 1.0 / b)) - Phi(x)) +
        0.5 * double(n) / (b * b) * x * phi(x);
    CHECK(c.values[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("both sum normalizations coincide when b^2 = n sigma^2 exactly") {
  auto rad = find_distribution("rademacher");
  const auto f = compute_functionals(*rad, 36);
  const auto grid = default_grid(-4.0, 4.0, 0.25);
  const auto c1 = eval_ln1(*rad, f, grid);
  const auto c2 = eval_ln2(*rad, f, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::fabs(c1.values[i] - c2.values[i]) <= 1e-12);
}

TEST_CASE("skewness terms evaluate their closed forms") {
  const std::vector<double> grid = {0.0, 1.0};
  const auto s = eval_edgeworth_student(2.0, 1, grid);
  CHECK(s.values[0] == doctest::Approx(0.13298076013381089).epsilon(1e-15));
  CHECK(s.values[1] == doctest::Approx(2.0 * 3.0 * phi(1.0) / 6.0).epsilon(1e-13));
  const auto p = eval_edgeworth_plain(2.0, 1, grid);
  CHECK(p.values[0] == doctest::Approx(0.13298076013381089).epsilon(1e-15));
  CHECK(p.values[1] == 0.0);  // x^2 - 1 vanishes

  const auto s4 = eval_edgeworth_student(1.2, 4, {0.0});
  CHECK(s4.values[0] == doctest::Approx(0.1 * 0.39894228040143268).epsilon(1e-13));
  CHECK_THROWS_AS(eval_edgeworth_student(2.0, 0, grid), std::invalid_argument);
}

TEST_CASE("quintic remainder of the studentized argument stays bounded") {
  const auto z = taylor5_check(1.3, 0.0);
  CHECK(z.approx_error == 0.0);
  CHECK(z.bound_ratio == 0.0);
  for (double x : {0.0, 0.5, 1.7, 3.0})
    for (double u : {1e-3, 1e-2, 0.1, 0.2, 0.5}) {
      const auto t = taylor5_check(x, u);
      CHECK(t.approx_error >= 0.0);
      CHECK(t.bound_ratio <= 100.0);
      const auto tm = taylor5_check(x, -u);
      CHECK(tm.bound_ratio <= 100.0);
    }
  // at the origin the expansion of Phi(-u) gives remainder -phi(0) u^5/40
  const auto t0 = taylor5_check(0.0, 1e-2);
  CHECK(t0.bound_ratio == doctest::Approx(0.39894228040143268 / 40.0).epsilon(1e-3));
  CHECK_THROWS_AS(taylor5_check(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("doubling the scale leaves every curve value untouched") {
  // all intermediates scale by exact powers of two, so the computed curves
  // agree bit for bit
  const auto grid = default_grid(-4.0, 4.0, 0.5);
  for (const char* name : {"rademacher", "centered-exponential"}) {
    auto base = find_distribution(name);
    auto twice = make_scaled(base, 2.0);
    const auto f0 = compute_functionals(*base, 64, 0.25);
    const auto f2 = compute_functionals(*twice, 64, 0.25);
    CHECK(f2.b_n == 2.0 * f0.b_n);
    CHECK(f2.delta_n == f0.delta_n);
    const auto c0 = eval_ln(*base, f0, grid);
    const auto c2 = eval_ln(*twice, f2, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(c2.values[i] == c0.values[i]);
  }
}

TEST_CASE("awkward scales change curve values only at roundoff level") {
  const auto grid = default_grid(-4.0, 4.0, 0.5);
  auto base = find_distribution("centered-exponential");
  auto seven = make_scaled(base, 7.0);
  const auto f0 = compute_functionals(*base, 64, 0.25);
  const auto f7 = compute_functionals(*seven, 64, 0.25);
  CHECK(f7.delta_n == doctest::Approx(f0.delta_n).epsilon(1e-9));
  const auto c0 = eval_ln(*base, f0, grid);
  const auto c7 = eval_ln(*seven, f7, grid);
  double sup = 0.0;
  for (double v : c0.values) sup = std::max(sup, std::fabs(v));
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::fabs(c7.values[i] - c0.values[i]) <=
          std::max(1e-9 * sup, 5e-13));
}
