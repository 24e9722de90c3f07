#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tstat {

enum class Kind { continuous, discrete };

struct Atom {
  double x;
  double p;
};

struct Interval {
  double lo;
  double hi;
};

// A zero-mean law in the catalog. Truncated moments E[X^j 1(|X|<=c)] and the
// two-sided tail P(|X|>c) are the primitives everything downstream consumes;
// closed forms are used where the law admits them and adaptive quadrature
// otherwise. Samplers are inverse-CDF transforms of a seeded uniform stream,
// which keeps runs bit-reproducible and makes scaled laws draw-for-draw
// comparable with their parents.
class Distribution {
 public:
  virtual ~Distribution() = default;

  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  Kind kind() const { return kind_; }
  bool symmetric() const { return symmetric_; }
  bool has_finite_variance() const { return finite_variance_; }
  // E[X^3] when E|X|^3 < infinity, absent otherwise.
  std::optional<double> third_moment() const { return third_moment_; }
  Interval support() const { return support_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  // E[X^j 1(|X| <= c)] for j in 0..8, c > 0.
  double truncated_moment(int j, double c) const;
  // P(|X| > c), c > 0.
  virtual double tail(double c) const;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double u) const = 0;
  virtual double density(double x) const;

  // ∫ h(x) f(x) dx over [lo, hi] ∩ support, continuous laws only. Infinite
  // endpoints are mapped through t = 1/s beyond max(|bound|, 1).
  double expect(const std::function<double(double)>& h, double lo, double hi,
                double abs_tol) const;

  // Radii at which the density jumps or kinks. Quadrature must split there:
  // a Gauss-Kronrod error estimate straddling a jump shrinks no faster than
  // the tolerance split, so convergence on such a cell is never guaranteed.
  // Defaults to the finite support edges.
  virtual std::vector<double> density_breaks() const;

  // count inverse-CDF draws from the stream seeded with `seed`.
  std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

  // Quadrature route for the truncated moment, exposed so tests can pit it
  // against the closed forms.
  double truncated_moment_numeric(int j, double c) const;

 protected:
  Distribution(std::string name, std::vector<double> params, Kind kind,
               bool symmetric, bool finite_variance,
               std::optional<double> third_moment, Interval support,
               std::vector<Atom> atoms = {});

  virtual std::optional<double> truncated_moment_closed(int j, double c) const;

  std::string name_;
  std::vector<double> params_;
  Kind kind_;
  bool symmetric_;
  bool finite_variance_;
  std::optional<double> third_moment_;
  Interval support_;
  std::vector<Atom> atoms_;
};

using DistPtr = std::shared_ptr<const Distribution>;

// The fixed catalog, in a stable order.
const std::vector<DistPtr>& catalog();

// Lookup by catalog name; throws std::invalid_argument for unknown names.
DistPtr find_distribution(const std::string& name);

// General finite-support discrete law (used by the catalog and by tests that
// need degenerate or custom atom sets). Probabilities must sum to 1.
DistPtr make_discrete(std::string name, std::vector<Atom> atoms);

// The law of scale * X for X ~ base. Moments, tails, quantiles and densities
// are delegated in closed form, so scale equivariance tests exercise real
// code paths rather than ad hoc rescaling.
DistPtr make_scaled(DistPtr base, double scale);

}  // namespace tstat
