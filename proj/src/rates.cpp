#include "tstat/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tstat/normal.hpp"

namespace tstat {

namespace {

std::vector<std::int64_t> checked_n_list(std::vector<std::int64_t> n_list,
                                         std::int64_t n_min) {
  if (n_list.empty()) throw std::invalid_argument("n_list must be non-empty");
  for (std::int64_t n : n_list)
    if (n < n_min)
      throw std::invalid_argument("n_list: every n must be >= " +
                                  std::to_string(n_min));
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  return n_list;
}

void check_points(double x0, double x1) {
  if (!(x0 > std::sqrt(3.0)))
    throw std::invalid_argument("x0 must exceed sqrt(3)");
  if (x1 == x0 || x1 == -x0)
    throw std::invalid_argument("x1 must differ from both -x0 and x0");
  if (!std::isfinite(x1)) throw std::invalid_argument("x1 must be finite");
}

std::vector<double> rate_grid(std::vector<double> base, double x0, double x1) {
  if (base.empty()) return default_grid(-10.0, 10.0, 0.005, {-x0, x0, x1});
  base.push_back(-x0);
  base.push_back(x0);
  base.push_back(x1);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  return base;
}

double value_at(const Curve& c, double x) {
  auto it = std::lower_bound(c.grid.begin(), c.grid.end(), x);
  if (it == c.grid.end() || *it != x)
    throw std::logic_error("requested point missing from grid");
  return c.values[static_cast<std::size_t>(it - c.grid.begin())];
}

RateRow make_row(const Curve& ln, const TruncationFunctionals& f,
                 const EmpiricalDistribution& emp, double x0, double x1,
                 std::int64_t replicates) {
  const auto& grid = ln.grid;
  const std::vector<double> F = empirical_cdf(emp, grid);

  RateRow row;
  row.n = f.n;
  row.delta_n = f.delta_n;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double phi_x = normal_cdf(grid[i]);
    row.sup_plain = std::max(row.sup_plain, std::fabs(F[i] - phi_x));
    row.sup_corrected =
        std::max(row.sup_corrected, std::fabs(F[i] - phi_x - ln.values[i]));
    row.sup_ln = std::max(row.sup_ln, std::fabs(ln.values[i]));
  }
  row.three_point_sup =
      std::max({std::fabs(value_at(ln, -x0)), std::fabs(value_at(ln, x0)),
                std::fabs(value_at(ln, x1))});
  const double rn = 1.0 / std::sqrt(static_cast<double>(f.n));
  row.ratio_25 = (row.sup_plain + rn) / (f.delta_n + rn);
  row.ratio_3pt = row.sup_ln > 0.0 ? row.three_point_sup / row.sup_ln : 0.0;
  row.source = emp.source;
  row.mc_half_width =
      emp.source == Source::exact ? 0.0 : dkw_half_width(replicates);
  return row;
}

}  // namespace

RateReport build_rate_report(const Distribution& dist,
                             std::vector<std::int64_t> n_list,
                             std::int64_t replicates, std::uint64_t seed,
                             double x0, double x1, double alpha,
                             Variant variant, const CurveOptions& opts,
                             std::vector<double> base_grid) {
  check_points(x0, x1);
  n_list = checked_n_list(std::move(n_list), 2);

  RateReport report;
  report.dist_name = dist.name();
  report.statistic = "t";
  report.variant = variant;
  report.alpha = alpha;
  report.x0 = x0;
  report.x1 = x1;
  report.replicates = replicates;
  report.seed = seed;

  const std::vector<double> grid = rate_grid(std::move(base_grid), x0, x1);
  for (std::int64_t n : n_list) {
    const TruncationFunctionals f = compute_functionals(dist, n, alpha);
    const Curve ln = eval_ln(dist, f, grid, opts);
    const EmpiricalDistribution emp =
        exact_T_feasible(dist, n)
            ? exact_T_distribution(dist, n, variant)
            : simulate_T(dist, n, replicates, seed, variant, opts.threads);
    report.rows.push_back(make_row(ln, f, emp, x0, x1, replicates));
  }
  return report;
}

std::vector<double> three_point_equivalence(const Distribution& dist,
                                            std::vector<std::int64_t> n_list,
                                            double x0, double x1,
                                            const CurveOptions& opts) {
  check_points(x0, x1);
  n_list = checked_n_list(std::move(n_list), 2);
  const std::vector<double> grid = default_grid(-10.0, 10.0, 0.005, {-x0, x0, x1});
  std::vector<double> out;
  for (std::int64_t n : n_list) {
    const TruncationFunctionals f = compute_functionals(dist, n, default_alpha);
    const Curve ln = eval_ln(dist, f, grid, opts);
    double sup_ln = 0.0;
    for (double v : ln.values) sup_ln = std::max(sup_ln, std::fabs(v));
    const double three = std::max({std::fabs(value_at(ln, -x0)),
                                   std::fabs(value_at(ln, x0)),
                                   std::fabs(value_at(ln, x1))});
    out.push_back(sup_ln > 0.0 ? three / sup_ln : 0.0);
  }
  return out;
}

RateReport nonstudentized_report(const Distribution& dist,
                                 std::vector<std::int64_t> n_list,
                                 std::int64_t replicates, std::uint64_t seed,
                                 SumScale scale, double x0, double x1,
                                 const CurveOptions& opts,
                                 std::vector<double> base_grid) {
  check_points(x0, x1);
  n_list = checked_n_list(std::move(n_list), 2);

  RateReport report;
  report.dist_name = dist.name();
  report.statistic = scale == SumScale::bn ? "sum/bn" : "sum/sigma";
  report.variant = Variant::raw;
  report.alpha = default_alpha;
  report.x0 = x0;
  report.x1 = x1;
  report.replicates = replicates;
  report.seed = seed;

  const std::vector<double> grid = rate_grid(std::move(base_grid), x0, x1);
  for (std::int64_t n : n_list) {
    const TruncationFunctionals f = compute_functionals(dist, n, default_alpha);
    const Curve corr = scale == SumScale::bn ? eval_ln1(dist, f, grid, opts)
                                             : eval_ln2(dist, f, grid, opts);
    const double normalizer =
        scale == SumScale::bn
            ? f.b_n
            : std::sqrt(static_cast<double>(n) * f.sigma_n2);
    const EmpiricalDistribution emp =
        exact_sum_feasible(dist, n)
            ? exact_sum_distribution(dist, n, normalizer)
            : simulate_sum(dist, n, normalizer, replicates, seed, opts.threads);
    report.rows.push_back(make_row(corr, f, emp, x0, x1, replicates));
  }
  return report;
}

}  // namespace tstat
