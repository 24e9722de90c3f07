#include "tstat/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tstat/parallel.hpp"
#include "tstat/rng.hpp"

namespace tstat {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr std::int64_t chunk_size = 4096;

// Statistic for one sample; degenerate denominators signal the sign of the sum.
double t_statistic(const double* x, std::int64_t n, Variant variant) {
  double s = 0.0, s2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    s += x[i];
    s2 += x[i] * x[i];
  }
  const double d2 = s2 - s * s / static_cast<double>(n);
  if (d2 <= 1e-12 * s2) {
    if (s > 0.0) return inf;
    if (s < 0.0) return -inf;
    return 0.0;
  }
  double t = s / std::sqrt(d2);
  if (variant == Variant::classical)
    t *= std::sqrt(static_cast<double>(n) / static_cast<double>(n - 1));
  return t;
}

void validate_mc_args(std::int64_t n, std::int64_t replicates) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
}

void validate_t_args(std::int64_t n, std::int64_t replicates) {
  if (n < 2) throw std::invalid_argument("n must be >= 2 for the t statistic");
  validate_mc_args(n, replicates);
}

// Runs `replicates` samples in fixed-size chunks, each with its own stream,
// so results do not depend on the thread count.
template <typename PerSample>
std::vector<double> run_chunks(const Distribution& dist, std::int64_t n,
                               std::int64_t replicates, std::uint64_t seed,
                               int threads, PerSample&& per_sample) {
  const std::int64_t n_chunks = (replicates + chunk_size - 1) / chunk_size;
  std::vector<double> out(static_cast<std::size_t>(replicates));
  parallel_for(
      static_cast<std::size_t>(n_chunks),
      [&](std::size_t c) {
        std::mt19937_64 eng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        const std::int64_t lo = static_cast<std::int64_t>(c) * chunk_size;
        const std::int64_t hi = std::min(lo + chunk_size, replicates);
        std::vector<double> sample(static_cast<std::size_t>(n));
        for (std::int64_t r = lo; r < hi; ++r) {
          for (std::int64_t i = 0; i < n; ++i)
            sample[static_cast<std::size_t>(i)] = dist.quantile(uniform_open(eng));
          out[static_cast<std::size_t>(r)] = per_sample(sample.data());
        }
      },
      threads);
  return out;
}

EmpiricalDistribution from_draws(const Distribution& dist, std::int64_t n,
                                 Variant variant, std::int64_t replicates,
                                 std::uint64_t seed, std::vector<double> draws) {
  EmpiricalDistribution e;
  e.dist_name = dist.name();
  e.n = n;
  e.variant = variant;
  e.source = Source::monte_carlo;
  e.replicates = replicates;
  e.seed = seed;
  const double w = 1.0 / static_cast<double>(replicates);
  std::sort(draws.begin(), draws.end());
  for (double v : draws) {
    if (v == -inf)
      e.mass_neg_inf += w;
    else if (v == inf)
      e.mass_pos_inf += w;
    else
      e.values.push_back(v);
  }
  e.weights.assign(e.values.size(), w);
  return e;
}

// Next composition of n into k nonnegative parts, lexicographic. Returns
// false after the last one.
bool next_composition(std::vector<std::int64_t>& c, std::int64_t n) {
  const std::size_t k = c.size();
  if (k == 1) return false;
  // Find rightmost position (before last) we can decrement into.
  for (std::size_t i = k - 1; i-- > 0;) {
    if (c[i] > 0) {
      --c[i];
      std::int64_t rest = n;
      for (std::size_t j = 0; j <= i; ++j) rest -= c[j];
      c[i + 1] = rest;
      for (std::size_t j = i + 2; j < k; ++j) c[j] = 0;
      return true;
    }
  }
  return false;
}

std::int64_t count_compositions(std::int64_t n, std::size_t k) {
  // C(n + k - 1, k - 1), saturating.
  double v = 1.0;
  for (std::size_t i = 1; i < k; ++i)
    v *= static_cast<double>(n + static_cast<std::int64_t>(i)) /
         static_cast<double>(i);
  if (v > 9e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(std::llround(v));
}

std::uint64_t multinomial_u64(std::int64_t n, const std::vector<std::int64_t>& c) {
  // Product of binomials, each exact in uint64 for n <= 14.
  std::uint64_t v = 1;
  std::int64_t rem = n;
  for (std::int64_t ci : c) {
    // C(rem, ci)
    std::uint64_t b = 1;
    for (std::int64_t i = 1; i <= ci; ++i)
      b = b * static_cast<std::uint64_t>(rem - ci + i) /
          static_cast<std::uint64_t>(i);
    v *= b;
    rem -= ci;
  }
  return v;
}

void merge_equal_values(EmpiricalDistribution& e, double value_eps) {
  // Combine numerically identical outcomes so exact laws list each atom once.
  if (e.values.empty()) return;
  std::vector<std::size_t> idx(e.values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return e.values[a] < e.values[b]; });
  std::vector<double> vals, wts;
  for (std::size_t i : idx) {
    const double v = e.values[i], w = e.weights[i];
    if (!vals.empty() &&
        std::fabs(v - vals.back()) <= value_eps * std::max(1.0, std::fabs(v)))
      wts.back() += w;
    else {
      vals.push_back(v);
      wts.push_back(w);
    }
  }
  e.values = std::move(vals);
  e.weights = std::move(wts);
}

}  // namespace

Variant parse_variant(const std::string& s) {
  if (s == "raw") return Variant::raw;
  if (s == "classical") return Variant::classical;
  throw std::invalid_argument("variant: expected 'raw' or 'classical'");
}

const char* variant_name(Variant v) {
  return v == Variant::raw ? "raw" : "classical";
}

double EmpiricalDistribution::total_mass() const {
  double s = mass_neg_inf + mass_pos_inf;
  for (double w : weights) s += w;
  return s;
}

double EmpiricalDistribution::cdf(double x) const {
  double s = mass_neg_inf;
  auto it = std::upper_bound(values.begin(), values.end(), x);
  for (auto p = values.begin(); p != it; ++p)
    s += weights[static_cast<std::size_t>(p - values.begin())];
  return s / total_mass();
}

EmpiricalDistribution simulate_T(const Distribution& dist, std::int64_t n,
                                 std::int64_t replicates, std::uint64_t seed,
                                 Variant variant, int threads) {
  validate_t_args(n, replicates);
  auto draws = run_chunks(dist, n, replicates, seed, threads,
                          [&](const double* x) { return t_statistic(x, n, variant); });
  return from_draws(dist, n, variant, replicates, seed, std::move(draws));
}

EmpiricalDistribution simulate_sum(const Distribution& dist, std::int64_t n,
                                   double normalizer, std::int64_t replicates,
                                   std::uint64_t seed, int threads) {
  validate_mc_args(n, replicates);
  if (!(normalizer > 0.0)) throw std::invalid_argument("normalizer must be > 0");
  auto draws = run_chunks(dist, n, replicates, seed, threads, [&](const double* x) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += x[i];
    return s / normalizer;
  });
  auto e = from_draws(dist, n, Variant::raw, replicates, seed, std::move(draws));
  return e;
}

bool exact_T_feasible(const Distribution& dist, std::int64_t n) {
  return dist.kind() == Kind::discrete && n >= 2 && n <= 14 &&
         dist.atoms().size() <= 4;
}

bool exact_sum_feasible(const Distribution& dist, std::int64_t n,
                        std::int64_t state_budget) {
  return dist.kind() == Kind::discrete && n >= 1 &&
         count_compositions(n, dist.atoms().size()) <= state_budget;
}

EmpiricalDistribution exact_T_distribution(const Distribution& dist,
                                           std::int64_t n, Variant variant) {
  if (dist.kind() != Kind::discrete)
    throw std::invalid_argument("exact enumeration needs a discrete distribution");
  if (n < 2 || n > 14)
    throw std::invalid_argument("exact T enumeration needs 2 <= n <= 14");
  const auto& atoms = dist.atoms();
  if (atoms.size() > 4)
    throw std::invalid_argument("exact T enumeration supports at most 4 atoms");

  EmpiricalDistribution e;
  e.dist_name = dist.name();
  e.n = n;
  e.variant = variant;
  e.source = Source::exact;

  const std::size_t k = atoms.size();
  std::vector<std::int64_t> c(k, 0);
  c[0] = n;
  std::vector<double> sample(static_cast<std::size_t>(n));
  do {
    const std::uint64_t m = multinomial_u64(n, c);
    double p = static_cast<double>(m);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < k; ++j) {
      p *= std::pow(atoms[j].p, static_cast<double>(c[j]));
      for (std::int64_t r = 0; r < c[j]; ++r) sample[pos++] = atoms[j].x;
    }
    const double t = t_statistic(sample.data(), n, variant);
    if (t == -inf)
      e.mass_neg_inf += p;
    else if (t == inf)
      e.mass_pos_inf += p;
    else {
      e.values.push_back(t);
      e.weights.push_back(p);
    }
  } while (next_composition(c, n));

  merge_equal_values(e, 1e-12);
  return e;
}

EmpiricalDistribution exact_sum_distribution(const Distribution& dist,
                                             std::int64_t n, double normalizer,
                                             std::int64_t state_budget) {
  if (dist.kind() != Kind::discrete)
    throw std::invalid_argument("exact enumeration needs a discrete distribution");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(normalizer > 0.0)) throw std::invalid_argument("normalizer must be > 0");
  const auto& atoms = dist.atoms();
  const std::size_t k = atoms.size();
  if (count_compositions(n, k) > state_budget)
    throw std::invalid_argument("exact sum enumeration exceeds state budget");

  EmpiricalDistribution e;
  e.dist_name = dist.name();
  e.n = n;
  e.variant = Variant::raw;
  e.source = Source::exact;

  // log n! and log p_j reused per composition.
  std::vector<double> logp(k);
  for (std::size_t j = 0; j < k; ++j) logp[j] = std::log(atoms[j].p);
  const double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);

  std::vector<std::int64_t> c(k, 0);
  c[0] = n;
  do {
    double lp = log_nfact;
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      lp += static_cast<double>(c[j]) * logp[j] -
            std::lgamma(static_cast<double>(c[j]) + 1.0);
      s += static_cast<double>(c[j]) * atoms[j].x;
    }
    e.values.push_back(s / normalizer);
    e.weights.push_back(std::exp(lp));
  } while (next_composition(c, n));

  merge_equal_values(e, 1e-12);
  return e;
}

std::vector<double> empirical_cdf(const EmpiricalDistribution& e,
                                  const std::vector<double>& grid) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] <= grid[i + 1]))
      throw std::invalid_argument("grid must be sorted ascending");
  // Prefix weights, then one forward sweep over the grid. Dividing by the
  // total mass (1 up to accumulated roundoff) pins F at exactly 1 past the
  // last value.
  const double total = e.total_mass();
  std::vector<double> out(grid.size());
  double acc = e.mass_neg_inf;
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (j < e.values.size() && e.values[j] <= grid[i]) acc += e.weights[j++];
    out[i] = acc / total;
  }
  return out;
}

double dkw_half_width(std::int64_t n_draws, double beta) {
  if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta in (0,1)");
  return std::sqrt(std::log(2.0 / beta) / (2.0 * static_cast<double>(n_draws)));
}

}  // namespace tstat
