// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsa {

/// Tolerance on probability sums and dominance comparisons.
inline constexpr double kProbTol = 1e-12;

struct Atom {
  double value;
  double mass;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Breakpoint {
  double q;
  double v;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// A single buyer's value prior in quantile space, where the quantile of a
/// value v is Pr[V >= v] (small quantile means high value).
///
/// Two representations are supported:
///  - Discrete: finitely many atoms sorted strictly descending by value.
///  - Curve: a nonincreasing value curve v(q) on [0,1], linearly
///    interpolated between breakpoints.
///
/// Instances are immutable once built.
class QuantileDistribution {
 public:
  enum class Kind { Discrete, Curve };

  /// Builds a discrete distribution. Atoms may arrive in any order; equal
  /// values are merged and zero-mass atoms dropped. Throws if a mass is
  /// negative or the masses do not sum to 1 within kProbTol.
  static QuantileDistribution discrete(std::vector<Atom> atoms);

  /// Builds a discrete distribution from (value, quantile) pairs, i.e. the
  /// quantile Pr[V >= value] of each support value. Values must be strictly
  /// descending and quantiles nondecreasing; the last quantile must be 1.
  /// Pairs whose quantile does not increase are dropped. Storing quantiles
  /// directly keeps telescoping constructions exact.
  static QuantileDistribution from_quantiles(std::span<const double> values,
                                             std::span<const double> quantiles);

  /// Point mass at `value`.
  static QuantileDistribution point_mass(double value);

  /// Builds a value curve. Breakpoints need q strictly increasing from 0 to
  /// 1 and v nonincreasing and nonnegative.
  static QuantileDistribution curve(std::vector<Breakpoint> breakpoints);

  Kind kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept { return kind_ == Kind::Discrete; }

  /// Atoms sorted descending by value (Discrete only; empty for Curve).
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  /// cumulative()[i] is the quantile of atoms()[i].value (Discrete only).
  const std::vector<double>& cumulative() const noexcept { return cum_; }
  const std::vector<Breakpoint>& breakpoints() const noexcept { return bps_; }

  std::size_t support_size() const noexcept { return atoms_.size(); }
  double max_value() const noexcept;
  double min_value() const noexcept;

  /// Pr[V >= v].
  double quantile_of(double v) const;

  /// The value owning quantile q. For Discrete this is the atom whose
  /// cumulative interval (q_prev, q_this] contains q. Throws on q == 0.
  double value_at(double q) const;

  /// Distinct values at which the quantile function may change.
  std::vector<double> breakpoint_values() const;

  bool operator==(const QuantileDistribution&) const = default;

 private:
  QuantileDistribution() = default;

  Kind kind_ = Kind::Discrete;
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
  std::vector<Breakpoint> bps_;
};

/// Empirical distribution: mass multiplicity(v)/m on each sample value.
QuantileDistribution from_samples(std::span<const double> values);

/// Rounds values with quantile above theta down to zero.
QuantileDistribution truncate_tail(const QuantileDistribution& d, double theta);

/// Moves all mass above `cap` down to `cap`.
QuantileDistribution truncate_top(const QuantileDistribution& d, double cap);

/// Rounds the lowest `eps` fraction of values down to zero.
QuantileDistribution truncate_bottom(const QuantileDistribution& d, double eps);

/// Applies a nondecreasing quantile map g to every positive value:
/// q'(v) = g(q(v)) for v > 0 and the remaining mass goes to 0.
template <typename QuantileMap>
QuantileDistribution shade_quantiles(const QuantileDistribution& d,
                                     QuantileMap&& g);

/// Uniform-quantile discretization of a curve prior; the atom for cell
/// ((k-1)/m, k/m] takes the value at the cell midpoint. Discrete inputs are
/// returned unchanged.
QuantileDistribution discretize(const QuantileDistribution& d,
                                std::size_t grid_size);

/// First-order stochastic dominance: Pr_D[X >= v] >= Pr_D'[X >= v] for all v.
bool dominates(const QuantileDistribution& d, const QuantileDistribution& dp);

/// Largest value of q^lower(v) - q^upper(v) over all v; nonpositive iff
/// `upper` dominates `lower` exactly.
double max_dominance_violation(const QuantileDistribution& upper,
                               const QuantileDistribution& lower);

/// Expected revenue of posting price p to a single buyer.
double posted_price_revenue(const QuantileDistribution& d, double price);

/// Best posted-price revenue (exact, including the interior of curve
/// segments) and the price achieving it.
struct PostedPrice {
  double price;
  double revenue;
};
PostedPrice best_posted_price(const QuantileDistribution& d);

// ---------------------------------------------------------------------------
// Revenue curves and ironing

struct RevenuePoint {
  double q;
  double r;
};

/// Points (q, q * v(q)) at (0, 0) and at every cumulative quantile of the
/// distribution (or every curve breakpoint).
struct RevenueCurve {
  std::vector<RevenuePoint> points;
};

RevenueCurve revenue_curve(const QuantileDistribution& d);

/// Upper concave envelope of a revenue curve.
struct IronedCurve {
  std::vector<RevenuePoint> vertices;
  std::vector<double> slopes;  // slopes[k] joins vertices[k] and vertices[k+1]

  /// Slope of the segment whose half-open quantile range (q_k, q_{k+1}]
  /// contains q; q == 0 maps to the first segment.
  double slope_at(double q) const;
  /// Envelope height at q.
  double value_at(double q) const;
};

IronedCurve iron(const RevenueCurve& curve);

/// Ironed virtual value of a bid: v is rounded down to the largest support
/// value <= v and the slope of the envelope segment containing its quantile
/// is returned. Values below the support get the final slope.
double ironed_virtual(const QuantileDistribution& d, double v);

/// Is every buyer support within [lo, hi]?
bool support_within(const QuantileDistribution& d, double lo, double hi);

// ---------------------------------------------------------------------------
// Product priors

enum class Family { Regular, MHR, Unit01, OneToH, Unknown };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct ProductPrior {
  std::vector<QuantileDistribution> buyers;
  Family family = Family::Unknown;
  double H = 0.0;  // meaningful only for Family::OneToH

  std::size_t size() const noexcept { return buyers.size(); }
  bool all_discrete() const noexcept;

  /// Checks nonemptiness and the family's support range. Throws on failure.
  void validate() const;
};

/// Coordinatewise dominance.
bool dominates(const ProductPrior& d, const ProductPrior& dp);

ProductPrior truncate_tail(const ProductPrior& d, std::span<const double> thetas);

// ---------------------------------------------------------------------------

template <typename QuantileMap>
QuantileDistribution shade_quantiles(const QuantileDistribution& d,
                                     QuantileMap&& g) {
  std::vector<double> values;
  std::vector<double> qs;
  const auto& atoms = d.atoms();
  const auto& cum = d.cumulative();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].value <= 0.0) break;
    double q = g(cum[i]);
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    if (!qs.empty() && q < qs.back()) q = qs.back();
    values.push_back(atoms[i].value);
    qs.push_back(q);
  }
  values.push_back(0.0);
  qs.push_back(1.0);
  return QuantileDistribution::from_quantiles(values, qs);
}

}  // namespace tsa
