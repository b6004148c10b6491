// SPDX-License-Identifier: Apache-2.0
#include "tsa/quantile_dist.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tsa {

namespace {

void require_finite_nonneg(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
  }
}

// Pr[V > v] for a curve: the supremum of quantiles whose value exceeds v.
double curve_strict_quantile(const std::vector<Breakpoint>& bps, double v) {
  if (bps.front().v <= v) return 0.0;
  if (bps.back().v > v) return 1.0;
  // Last index with value > v; the next breakpoint has value <= v.
  std::size_t k = 0;
  while (k + 1 < bps.size() && bps[k + 1].v > v) ++k;
  const Breakpoint& a = bps[k];
  const Breakpoint& b = bps[k + 1];
  const double t = (a.v - v) / (a.v - b.v);
  return a.q + t * (b.q - a.q);
}

double curve_quantile(const std::vector<Breakpoint>& bps, double v) {
  if (v <= bps.back().v) return 1.0;
  if (v > bps.front().v) return 0.0;
  std::size_t k = 0;
  while (k + 1 < bps.size() && bps[k + 1].v >= v) ++k;
  if (k + 1 == bps.size()) return 1.0;
  const Breakpoint& a = bps[k];
  const Breakpoint& b = bps[k + 1];
  const double t = (a.v - v) / (a.v - b.v);
  return a.q + t * (b.q - a.q);
}

double strict_quantile_of(const QuantileDistribution& d, double v) {
  if (!d.is_discrete()) return curve_strict_quantile(d.breakpoints(), v);
  const auto& atoms = d.atoms();
  const auto& cum = d.cumulative();
  double q = 0.0;
  for (std::size_t i = 0; i < atoms.size() && atoms[i].value > v; ++i) q = cum[i];
  return q;
}

}  // namespace

QuantileDistribution QuantileDistribution::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("empty support");
  double total = 0.0;
  for (const Atom& a : atoms) {
    require_finite_nonneg(a.value, "value");
    require_finite_nonneg(a.mass, "mass");
    total += a.mass;
  }
  if (std::abs(total - 1.0) > kProbTol) {
    throw std::invalid_argument("masses must sum to 1");
  }
  std::map<double, double, std::greater<>> merged;
  for (const Atom& a : atoms) merged[a.value] += a.mass;

  QuantileDistribution d;
  d.kind_ = Kind::Discrete;
  double run = 0.0;
  for (const auto& [v, m] : merged) {
    if (m <= 0.0) continue;
    run += m;
    d.atoms_.push_back({v, m});
    d.cum_.push_back(run);
  }
  d.cum_.back() = 1.0;
  return d;
}

QuantileDistribution QuantileDistribution::from_quantiles(
    std::span<const double> values, std::span<const double> quantiles) {
  if (values.empty() || values.size() != quantiles.size()) {
    throw std::invalid_argument("values and quantiles must be nonempty and equal length");
  }
  if (std::abs(quantiles.back() - 1.0) > kProbTol) {
    throw std::invalid_argument("last quantile must be 1");
  }
  QuantileDistribution d;
  d.kind_ = Kind::Discrete;
  double prev_q = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require_finite_nonneg(values[i], "value");
    double q = (i + 1 == values.size()) ? 1.0 : quantiles[i];
    if (q < prev_q - kProbTol || q > 1.0 + kProbTol) {
      throw std::invalid_argument("quantiles must be nondecreasing within [0,1]");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      throw std::invalid_argument("values must be nonincreasing");
    }
    if (!d.atoms_.empty() && d.atoms_.back().value == values[i]) {
      // Same value again: it owns the larger quantile.
      if (q > d.cum_.back()) {
        d.atoms_.back().mass += q - d.cum_.back();
        d.cum_.back() = q;
        prev_q = q;
      }
      continue;
    }
    if (q <= prev_q) continue;
    d.atoms_.push_back({values[i], q - prev_q});
    d.cum_.push_back(q);
    prev_q = q;
  }
  return d;
}

QuantileDistribution QuantileDistribution::point_mass(double value) {
  return discrete({{value, 1.0}});
}

QuantileDistribution QuantileDistribution::curve(std::vector<Breakpoint> bps) {
  if (bps.size() < 2) throw std::invalid_argument("curve needs at least two breakpoints");
  if (bps.front().q != 0.0 || bps.back().q != 1.0) {
    throw std::invalid_argument("curve breakpoints must span quantiles 0 to 1");
  }
  for (std::size_t i = 0; i < bps.size(); ++i) {
    require_finite_nonneg(bps[i].v, "value");
    if (i > 0 && !(bps[i].q > bps[i - 1].q)) {
      throw std::invalid_argument("curve quantiles must be strictly increasing");
    }
    if (i > 0 && bps[i].v > bps[i - 1].v) {
      throw std::invalid_argument("curve values must be nonincreasing");
    }
  }
  QuantileDistribution d;
  d.kind_ = Kind::Curve;
  d.bps_ = std::move(bps);
  return d;
}

double QuantileDistribution::max_value() const noexcept {
  return is_discrete() ? atoms_.front().value : bps_.front().v;
}

double QuantileDistribution::min_value() const noexcept {
  return is_discrete() ? atoms_.back().value : bps_.back().v;
}

double QuantileDistribution::quantile_of(double v) const {
  if (v <= 0.0) return 1.0;
  if (!is_discrete()) return curve_quantile(bps_, v);
  // Atoms descend by value; find the last one with value >= v.
  auto it = std::partition_point(atoms_.begin(), atoms_.end(),
                                 [v](const Atom& a) { return a.value >= v; });
  if (it == atoms_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double QuantileDistribution::value_at(double q) const {
  if (!(q > 0.0)) throw std::invalid_argument("quantile zero has no witness value");
  if (q > 1.0 + kProbTol) throw std::invalid_argument("quantile above 1");
  q = std::min(q, 1.0);
  if (is_discrete()) {
    auto it = std::lower_bound(cum_.begin(), cum_.end(), q);
    if (it == cum_.end()) return atoms_.back().value;
    return atoms_[static_cast<std::size_t>(it - cum_.begin())].value;
  }
  auto it = std::lower_bound(bps_.begin(), bps_.end(), q,
                             [](const Breakpoint& b, double x) { return b.q < x; });
  const std::size_t k = static_cast<std::size_t>(it - bps_.begin());
  const Breakpoint& b = bps_[k];
  if (b.q == q) return b.v;
  const Breakpoint& a = bps_[k - 1];
  const double t = (q - a.q) / (b.q - a.q);
  return a.v + t * (b.v - a.v);
}

std::vector<double> QuantileDistribution::breakpoint_values() const {
  std::vector<double> out;
  if (is_discrete()) {
    for (const Atom& a : atoms_) out.push_back(a.value);
  } else {
    for (const Breakpoint& b : bps_) {
      if (out.empty() || out.back() != b.v) out.push_back(b.v);
    }
  }
  return out;
}

QuantileDistribution from_samples(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample set");
  std::map<double, std::size_t, std::greater<>> counts;
  for (double v : values) {
    require_finite_nonneg(v, "sample");
    ++counts[v];
  }
  const double m = static_cast<double>(values.size());
  std::vector<double> vs;
  std::vector<double> qs;
  std::size_t run = 0;
  for (const auto& [v, c] : counts) {
    run += c;
    vs.push_back(v);
    qs.push_back(static_cast<double>(run) / m);
  }
  return QuantileDistribution::from_quantiles(vs, qs);
}

QuantileDistribution truncate_tail(const QuantileDistribution& d, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0,1]");
  if (!d.is_discrete()) throw std::invalid_argument("discretize first");
  return shade_quantiles(d, [theta](double q) { return std::min(q, theta); });
}

QuantileDistribution truncate_bottom(const QuantileDistribution& d, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0,1]");
  if (!d.is_discrete()) throw std::invalid_argument("discretize first");
  return shade_quantiles(d, [eps](double q) { return std::min(q, 1.0 - eps); });
}

QuantileDistribution truncate_top(const QuantileDistribution& d, double cap) {
  require_finite_nonneg(cap, "cap");
  if (d.is_discrete()) {
    std::vector<Atom> atoms;
    for (const Atom& a : d.atoms()) atoms.push_back({std::min(a.value, cap), a.mass});
    std::vector<double> vs;
    std::vector<double> qs;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      vs.push_back(atoms[i].value);
      qs.push_back(d.cumulative()[i]);
    }
    return QuantileDistribution::from_quantiles(vs, qs);
  }
  const auto& bps = d.breakpoints();
  std::vector<Breakpoint> out;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    if (i > 0 && bps[i - 1].v > cap && bps[i].v < cap) {
      const double t = (bps[i - 1].v - cap) / (bps[i - 1].v - bps[i].v);
      out.push_back({bps[i - 1].q + t * (bps[i].q - bps[i - 1].q), cap});
    }
    out.push_back({bps[i].q, std::min(bps[i].v, cap)});
  }
  return QuantileDistribution::curve(std::move(out));
}

QuantileDistribution discretize(const QuantileDistribution& d, std::size_t grid_size) {
  if (d.is_discrete()) return d;
  if (grid_size == 0) throw std::invalid_argument("grid size must be positive");
  const double m = static_cast<double>(grid_size);
  std::vector<double> vs(grid_size);
  std::vector<double> qs(grid_size);
  for (std::size_t k = 1; k <= grid_size; ++k) {
    vs[k - 1] = d.value_at((static_cast<double>(k) - 0.5) / m);
    qs[k - 1] = static_cast<double>(k) / m;
  }
  return QuantileDistribution::from_quantiles(vs, qs);
}

double max_dominance_violation(const QuantileDistribution& upper,
                               const QuantileDistribution& lower) {
  std::vector<double> vs = upper.breakpoint_values();
  for (double v : lower.breakpoint_values()) vs.push_back(v);
  vs.push_back(0.0);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  // Both quantile functions are left-continuous and piecewise linear between
  // consecutive candidate values, so the value and the right limit at each
  // candidate cover the supremum.
  double worst = -1.0;
  for (double v : vs) {
    worst = std::max(worst, lower.quantile_of(v) - upper.quantile_of(v));
    worst = std::max(worst, strict_quantile_of(lower, v) - strict_quantile_of(upper, v));
  }
  return worst;
}

bool dominates(const QuantileDistribution& d, const QuantileDistribution& dp) {
  return max_dominance_violation(d, dp) <= kProbTol;
}

double posted_price_revenue(const QuantileDistribution& d, double price) {
  return price * d.quantile_of(price);
}

PostedPrice best_posted_price(const QuantileDistribution& d) {
  PostedPrice best{0.0, 0.0};
  auto consider = [&](double p) {
    const double r = posted_price_revenue(d, p);
    if (r > best.revenue) best = {p, r};
  };
  if (d.is_discrete()) {
    for (const Atom& a : d.atoms()) consider(a.value);
    return best;
  }
  const auto& bps = d.breakpoints();
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    consider(bps[k + 1].v);
    const double s = (bps[k + 1].v - bps[k].v) / (bps[k + 1].q - bps[k].q);
    if (s < 0.0) {
      // q * (v_k + s (q - q_k)) peaks where its derivative vanishes.
      const double qstar = -(bps[k].v - s * bps[k].q) / (2.0 * s);
      if (qstar > bps[k].q && qstar < bps[k + 1].q) consider(d.value_at(qstar));
    }
  }
  return best;
}

RevenueCurve revenue_curve(const QuantileDistribution& d) {
  RevenueCurve c;
  c.points.push_back({0.0, 0.0});
  if (d.is_discrete()) {
    for (std::size_t i = 0; i < d.atoms().size(); ++i) {
      const double q = d.cumulative()[i];
      c.points.push_back({q, q * d.atoms()[i].value});
    }
  } else {
    for (const Breakpoint& b : d.breakpoints()) {
      if (b.q > 0.0) c.points.push_back({b.q, b.q * b.v});
    }
  }
  return c;
}

IronedCurve iron(const RevenueCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty revenue curve");
  IronedCurve h;
  auto& hull = h.vertices;
  for (const RevenuePoint& p : curve.points) {
    while (hull.size() >= 2) {
      const RevenuePoint& o = hull[hull.size() - 2];
      const RevenuePoint& a = hull.back();
      const double cross = (a.q - o.q) * (p.r - o.r) - (a.r - o.r) * (p.q - o.q);
      const double scale = std::max({1.0, std::abs(p.r), std::abs(o.r), std::abs(a.r)});
      if (cross >= -1e-15 * scale) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    h.slopes.push_back((hull[k + 1].r - hull[k].r) / (hull[k + 1].q - hull[k].q));
  }
  return h;
}

double IronedCurve::slope_at(double q) const {
  if (slopes.empty()) return 0.0;
  auto it = std::lower_bound(vertices.begin() + 1, vertices.end(), q,
                             [](const RevenuePoint& p, double x) { return p.q < x; });
  if (it == vertices.end()) return slopes.back();
  return slopes[static_cast<std::size_t>(it - vertices.begin()) - 1];
}

double IronedCurve::value_at(double q) const {
  if (slopes.empty()) return vertices.front().r;
  auto it = std::lower_bound(vertices.begin() + 1, vertices.end(), q,
                             [](const RevenuePoint& p, double x) { return p.q < x; });
  if (it == vertices.end()) return vertices.back().r;
  const RevenuePoint& a = *(it - 1);
  return a.r + (q - a.q) * slopes[static_cast<std::size_t>(it - vertices.begin()) - 1];
}

double ironed_virtual(const QuantileDistribution& d, double v) {
  if (v < 0.0) throw std::invalid_argument("negative value");
  const IronedCurve h = iron(revenue_curve(d));
  if (!d.is_discrete()) return h.slope_at(d.quantile_of(v));
  const auto& atoms = d.atoms();
  auto it = std::partition_point(atoms.begin(), atoms.end(),
                                 [v](const Atom& a) { return a.value > v; });
  if (it == atoms.end()) return h.slopes.back();
  return h.slope_at(d.cumulative()[static_cast<std::size_t>(it - atoms.begin())]);
}

bool support_within(const QuantileDistribution& d, double lo, double hi) {
  return d.min_value() >= lo - kProbTol && d.max_value() <= hi + kProbTol;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Regular: return "regular";
    case Family::MHR: return "mhr";
    case Family::Unit01: return "unit01";
    case Family::OneToH: return "one_to_h";
    case Family::Unknown: return "unknown";
  }
  return "unknown";
}

Family family_from_string(const std::string& s) {
  if (s == "regular") return Family::Regular;
  if (s == "mhr") return Family::MHR;
  if (s == "unit01") return Family::Unit01;
  if (s == "one_to_h") return Family::OneToH;
  if (s == "unknown") return Family::Unknown;
  throw std::invalid_argument("unknown family: " + s);
}

bool ProductPrior::all_discrete() const noexcept {
  return std::all_of(buyers.begin(), buyers.end(),
                     [](const QuantileDistribution& d) { return d.is_discrete(); });
}

void ProductPrior::validate() const {
  if (buyers.empty()) throw std::invalid_argument("product prior has no buyers");
  if (family == Family::Unit01) {
    for (const auto& b : buyers) {
      if (!support_within(b, 0.0, 1.0)) throw std::invalid_argument("unit01 buyer outside [0,1]");
    }
  }
  if (family == Family::OneToH) {
    if (!(H > 1.0)) throw std::invalid_argument("H must exceed 1");
    for (const auto& b : buyers) {
      if (!support_within(b, 1.0, H)) throw std::invalid_argument("one_to_h buyer outside [1,H]");
    }
  }
}

bool dominates(const ProductPrior& d, const ProductPrior& dp) {
  if (d.size() != dp.size()) return false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!dominates(d.buyers[i], dp.buyers[i])) return false;
  }
  return true;
}

ProductPrior truncate_tail(const ProductPrior& d, std::span<const double> thetas) {
  if (thetas.size() != d.size()) throw std::invalid_argument("one threshold per buyer required");
  ProductPrior out;
  out.family = Family::Unknown;
  out.H = d.H;
  for (std::size_t i = 0; i < d.size(); ++i) out.buyers.push_back(truncate_tail(d.buyers[i], thetas[i]));
  return out;
}

}  // namespace tsa
