#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstat/distributions.hpp"
#include "tstat/functionals.hpp"
#include "tstat/leading_terms.hpp"
#include "tstat/simulation.hpp"

namespace tstat {

// One row of a convergence-rate table, for a single sample size.
//   sup_plain       sup over the grid of |F(x) - Phi(x)|
//   sup_corrected   same with the leading-term correction subtracted
//   sup_ln          sup over the grid of the correction itself
//   three_point_sup sup of the correction over {-x0, x0, x1}
//   ratio_25        (sup_plain + n^{-1/2}) / (delta_n + n^{-1/2})
//   ratio_3pt       three_point_sup / sup_ln, in [0, 1]
//   mc_half_width   DKW envelope for the empirical CDF; 0 for exact rows
struct RateRow {
  std::int64_t n = 0;
  double delta_n = 0.0;
  double sup_plain = 0.0;
  double sup_corrected = 0.0;
  double sup_ln = 0.0;
  double three_point_sup = 0.0;
  double ratio_25 = 0.0;
  double ratio_3pt = 0.0;
  double mc_half_width = 0.0;
  Source source = Source::monte_carlo;
};

struct RateReport {
  std::string dist_name;
  std::string statistic;  // "t", "sum/bn" or "sum/sigma"
  Variant variant = Variant::raw;
  double alpha = default_alpha;
  double x0 = 2.0;
  double x1 = 0.0;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<RateRow> rows;  // ascending in n
};

// Normalizer for the non-Studentized sum: the truncation radius b_n, or
// sqrt(n) times the truncated standard deviation.
enum class SumScale { bn, sigma };

// Per-n discrepancy table for the Studentized statistic. The empirical CDF
// comes from exact enumeration when feasible (discrete law, <= 4 atoms,
// n <= 14), else Monte Carlo with the given replicates and seed. Sups run
// over base_grid (the default grid when empty) extended by {-x0, x0, x1}.
// Requires x0 > sqrt(3), x1 not in {-x0, x0}, every n >= 2.
RateReport build_rate_report(const Distribution& dist,
                             std::vector<std::int64_t> n_list,
                             std::int64_t replicates, std::uint64_t seed,
                             double x0 = 2.0, double x1 = 0.0,
                             double alpha = default_alpha,
                             Variant variant = Variant::raw,
                             const CurveOptions& opts = {},
                             std::vector<double> base_grid = {});

// ratio_3pt per n (quadrature only, no sampling).
std::vector<double> three_point_equivalence(const Distribution& dist,
                                            std::vector<std::int64_t> n_list,
                                            double x0 = 2.0, double x1 = 0.0,
                                            const CurveOptions& opts = {});

// Same table for the normalized plain sum, corrected with the matching
// leading term. Exact enumeration when the composition count fits the
// default state budget.
RateReport nonstudentized_report(const Distribution& dist,
                                 std::vector<std::int64_t> n_list,
                                 std::int64_t replicates, std::uint64_t seed,
                                 SumScale scale = SumScale::bn, double x0 = 2.0,
                                 double x1 = 0.0,
                                 const CurveOptions& opts = {},
                                 std::vector<double> base_grid = {});

}  // namespace tstat
