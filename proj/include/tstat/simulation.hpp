#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tstat/distributions.hpp"

namespace tstat {

// How the statistic on each sample of size n is formed.
//   raw:       T = S / sqrt(S2 - S^2/n)                 with S = sum X_i
//   classical: sqrt(n / (n - 1)) * T                    (finite T only)
// Degenerate samples (S2 - S^2/n <= 1e-12 * S2) map to +inf when S > 0,
// -inf when S < 0, and 0 when S == 0.
enum class Variant { raw, classical };

Variant parse_variant(const std::string& s);
const char* variant_name(Variant v);

// Where a distribution of the statistic came from.
enum class Source { monte_carlo, exact };

// Weighted one-dimensional distribution of a statistic. Monte Carlo runs
// carry equal weights 1/replicates; exact enumerations carry the outcome
// probabilities. Values are sorted; +-inf outcomes are kept out of `values`
// and tracked as separate masses.
struct EmpiricalDistribution {
  std::string dist_name;
  std::int64_t n = 0;
  Variant variant = Variant::raw;
  Source source = Source::monte_carlo;
  std::int64_t replicates = 0;  // 0 for exact
  std::uint64_t seed = 0;       // unused for exact

  std::vector<double> values;   // sorted ascending
  std::vector<double> weights;  // same length, each > 0
  double mass_neg_inf = 0.0;
  double mass_pos_inf = 0.0;

  double total_mass() const;
  // P(statistic <= x), right-continuous, includes mass at -inf.
  double cdf(double x) const;
};

// Monte Carlo over `replicates` independent samples of size n. Deterministic
// for a fixed (dist, n, replicates, seed, variant, threads is irrelevant).
EmpiricalDistribution simulate_T(const Distribution& dist, std::int64_t n,
                                 std::int64_t replicates, std::uint64_t seed,
                                 Variant variant, int threads = 0);

// Exact law of T for a discrete distribution by enumerating atom counts.
// Supports up to 4 atoms and n <= 14 (multinomial coefficients stay within
// uint64). Throws invalid_argument outside that range.
EmpiricalDistribution exact_T_distribution(const Distribution& dist,
                                           std::int64_t n, Variant variant);

// Whether the corresponding exact enumeration is within range.
bool exact_T_feasible(const Distribution& dist, std::int64_t n);
bool exact_sum_feasible(const Distribution& dist, std::int64_t n,
                        std::int64_t state_budget = 2000000);

// Monte Carlo law of the normalized sum sum(X_i) / normalizer.
EmpiricalDistribution simulate_sum(const Distribution& dist, std::int64_t n,
                                   double normalizer, std::int64_t replicates,
                                   std::uint64_t seed, int threads = 0);

// Exact law of sum(X_i) / normalizer for a discrete distribution. Enumerates
// atom-count compositions; probabilities accumulate in log space. Throws
// invalid_argument when the composition count exceeds `state_budget`.
EmpiricalDistribution exact_sum_distribution(const Distribution& dist,
                                             std::int64_t n, double normalizer,
                                             std::int64_t state_budget = 2000000);

// F(x) for every x in `grid` (grid must be sorted ascending).
std::vector<double> empirical_cdf(const EmpiricalDistribution& e,
                                  const std::vector<double>& grid);

// Dvoretzky-Kiefer-Wolfowitz envelope: with probability >= 1 - beta the
// empirical CDF of N iid draws stays within this band of the truth.
double dkw_half_width(std::int64_t n_draws, double beta = 1e-3);

}  // namespace tstat
