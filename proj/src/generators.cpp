// SPDX-License-Identifier: Apache-2.0
#include "tsa/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tsa/rng.hpp"

namespace tsa {

namespace {

constexpr int kMaxAttempts = 100;
constexpr double kJumpGap = 1e-9;
constexpr double kGridStep = 1e-3;

double exponential(CounterStream& rng) { return -std::log(1.0 - rng.uniform()); }

std::vector<double> dirichlet(CounterStream& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) total += (x = exponential(rng) + 1e-12);
  for (double& x : w) x /= total;
  return w;
}

QuantileDistribution random_range_buyer(CounterStream& rng, std::size_t m, double lo, double hi) {
  const std::vector<double> w = dirichlet(rng, m);
  std::vector<Atom> atoms(m);
  for (std::size_t k = 0; k < m; ++k) atoms[k] = {lo + (hi - lo) * rng.uniform(), w[k]};
  // Renormalize against rounding so the sum check is tight.
  double total = 0.0;
  for (const Atom& a : atoms) total += a.mass;
  atoms.back().mass += 1.0 - total;
  return QuantileDistribution::discrete(std::move(atoms));
}

// Concave revenue curve with random breakpoints and strictly decreasing
// segment slopes; values are R(c_k) / c_k.
QuantileDistribution random_regular_buyer(CounterStream& rng, std::size_t m) {
  std::vector<double> cum(m);
  for (std::size_t k = 0; k + 1 < m; ++k) cum[k] = rng.uniform();
  cum[m - 1] = 1.0;
  std::sort(cum.begin(), cum.end() - 1);
  const double top = 0.5 + rng.uniform();
  const double drop = top * (0.5 + 2.0 * rng.uniform());
  const std::vector<double> gaps = dirichlet(rng, m);
  std::vector<double> vs(m);
  double slope = top;
  double r = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    r += slope * (cum[k] - prev);
    prev = cum[k];
    if (r <= 0.0 || cum[k] <= 0.0) return QuantileDistribution::point_mass(0.0);
    vs[k] = r / cum[k];
    slope -= drop * gaps[k];
  }
  for (std::size_t k = 1; k < m; ++k) {
    if (!(vs[k] < vs[k - 1])) return QuantileDistribution::point_mass(0.0);
  }
  return QuantileDistribution::from_quantiles(vs, cum);
}

// Shifted exponential v(q) = a - ln(q) / lambda sampled at q = k/m.
QuantileDistribution random_mhr_buyer(CounterStream& rng, std::size_t m) {
  const double a = rng.uniform();
  const double lambda = 0.5 + 4.0 * rng.uniform();
  std::vector<double> vs(m);
  std::vector<double> qs(m);
  for (std::size_t k = 1; k <= m; ++k) {
    qs[k - 1] = static_cast<double>(k) / static_cast<double>(m);
    vs[k - 1] = a - std::log(qs[k - 1]) / lambda;
  }
  return QuantileDistribution::from_quantiles(vs, qs);
}

bool buyer_ok(const QuantileDistribution& d, Family family, double H, std::size_t support) {
  switch (family) {
    case Family::Unit01: return support_within(d, 0.0, 1.0);
    case Family::OneToH: return support_within(d, 1.0, H);
    case Family::Regular:
    case Family::MHR:
      return d.support_size() == support && d.min_value() > 0.0 && is_regular(d);
    case Family::Unknown: return true;
  }
  return false;
}

// Appends breakpoints of v on [q0, q1] at a fine grid, skipping q0 when it
// repeats the previous breakpoint.
void add_piece(std::vector<Breakpoint>& bps, double q0, double q1,
               const std::function<double(double)>& v) {
  if (!(q1 > q0)) return;
  const auto pieces = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil((q1 - q0) / kGridStep)));
  for (std::size_t k = 0; k <= pieces; ++k) {
    const double q = k == pieces ? q1 : q0 + (q1 - q0) * static_cast<double>(k) / static_cast<double>(pieces);
    if (!bps.empty() && q <= bps.back().q) continue;
    bps.push_back({q, v(q)});
  }
}

// Value curve for a piecewise-linear revenue curve through `pts`, which
// starts at q = 0.
QuantileDistribution curve_from_revenue(const std::vector<RevenuePoint>& pts) {
  std::vector<Breakpoint> bps;
  const double first_slope = (pts[1].r - pts[0].r) / (pts[1].q - pts[0].q);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const RevenuePoint a = pts[k];
    const RevenuePoint b = pts[k + 1];
    const double slope = (b.r - a.r) / (b.q - a.q);
    add_piece(bps, a.q, b.q, [&](double q) {
      if (q == 0.0) return first_slope;
      return std::max(0.0, (a.r + slope * (q - a.q)) / q);
    });
  }
  // Guard against rounding making the interpolated values tick upward.
  for (std::size_t k = 1; k < bps.size(); ++k) bps[k].v = std::min(bps[k].v, bps[k - 1].v);
  return QuantileDistribution::curve(std::move(bps));
}

RevenuePoint intersect(RevenuePoint p, RevenuePoint p2, RevenuePoint q, RevenuePoint q2) {
  const double rx = p2.q - p.q;
  const double ry = p2.r - p.r;
  const double sx = q2.q - q.q;
  const double sy = q2.r - q.r;
  const double t = ((q.q - p.q) * sy - (q.r - p.r) * sx) / (rx * sy - ry * sx);
  return {p.q + t * rx, p.r + t * ry};
}

}  // namespace

bool is_regular(const QuantileDistribution& d) {
  // Collinear points are dropped by the hull, so compare heights instead.
  const RevenueCurve c = revenue_curve(d);
  const IronedCurve h = iron(c);
  double scale = 1.0;
  for (const RevenuePoint& p : c.points) scale = std::max(scale, p.r);
  for (const RevenuePoint& p : c.points) {
    if (h.value_at(p.q) - p.r > 1e-9 * scale) return false;
  }
  return true;
}

bool check_family(const ProductPrior& prior) {
  try {
    prior.validate();
  } catch (const std::invalid_argument&) {
    return false;
  }
  for (const auto& d : prior.buyers) {
    if ((prior.family == Family::Regular || prior.family == Family::MHR) && !is_regular(d)) return false;
  }
  return true;
}

ProductPrior gen_family(Family family, const GenShape& shape, std::uint64_t seed) {
  if (shape.n < 1) throw std::invalid_argument("n must be at least 1");
  if (shape.support < 1) throw std::invalid_argument("support size must be at least 1");
  if (family == Family::OneToH && !(shape.H > 1.0)) throw std::invalid_argument("H must exceed 1");
  if (family == Family::Unknown) throw std::invalid_argument("unknown family");
  ProductPrior prior;
  prior.family = family;
  prior.H = family == Family::OneToH ? shape.H : 0.0;
  for (std::size_t i = 0; i < shape.n; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      CounterStream rng(derive_seed(seed, i), static_cast<std::uint64_t>(attempt));
      QuantileDistribution d = QuantileDistribution::point_mass(0.0);
      switch (family) {
        case Family::Unit01: d = random_range_buyer(rng, shape.support, 0.0, 1.0); break;
        case Family::OneToH: d = random_range_buyer(rng, shape.support, 1.0, shape.H); break;
        case Family::Regular: d = random_regular_buyer(rng, shape.support); break;
        case Family::MHR: d = random_mhr_buyer(rng, shape.support); break;
        case Family::Unknown: break;
      }
      if (buyer_ok(d, family, shape.H, shape.support)) {
        prior.buyers.push_back(std::move(d));
        done = true;
      }
    }
    if (!done) throw std::runtime_error("generator failed the family check after 100 attempts");
  }
  if (!check_family(prior)) throw std::runtime_error("generated prior failed the family check");
  return prior;
}

QuantileDistribution gen_top_triangle(unsigned s, std::uint64_t index) {
  if (s >= 63 || index >= (std::uint64_t{1} << s)) {
    throw std::invalid_argument("top triangle index out of range");
  }
  RevenuePoint bl{0.0, 0.0};
  RevenuePoint br{1.0, 0.0};
  RevenuePoint top{0.5, 1.0};
  std::vector<RevenuePoint> curve{bl, top, br};
  std::size_t apex = 1;
  for (unsigned level = 0; level < s; ++level) {
    const RevenuePoint lm{(bl.q + top.q) / 2.0, (bl.r + top.r) / 2.0};
    const RevenuePoint rm{(br.q + top.q) / 2.0, (br.r + top.r) / 2.0};
    const RevenuePoint m{(lm.q + rm.q) / 2.0, (lm.r + rm.r) / 2.0};
    // The split replaces the apex by three points; base corners of the new
    // top triangle stay on the curve so later splits keep it continuous.
    std::vector<RevenuePoint> repl;
    if (((index >> level) & 1U) == 0) {
      const RevenuePoint pa = intersect(bl, m, top, br);
      repl = {m, pa, rm};
      bl = m;
      br = rm;
      top = pa;
    } else {
      const RevenuePoint pb = intersect(br, m, top, bl);
      repl = {lm, pb, m};
      bl = lm;
      br = m;
      top = pb;
    }
    curve.erase(curve.begin() + static_cast<std::ptrdiff_t>(apex));
    curve.insert(curve.begin() + static_cast<std::ptrdiff_t>(apex), repl.begin(), repl.end());
    ++apex;
  }
  // Keep only corners; the midline points sit on straight pieces.
  std::vector<RevenuePoint> corners{curve.front()};
  for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
    const RevenuePoint& o = corners.back();
    const RevenuePoint& a = curve[k];
    const RevenuePoint& b = curve[k + 1];
    const double cross = (a.q - o.q) * (b.r - o.r) - (a.r - o.r) * (b.q - o.q);
    if (std::abs(cross) > 1e-15) corners.push_back(a);
  }
  corners.push_back(curve.back());
  return curve_from_revenue(corners);
}

std::size_t unit_hill_sites(double eps) {
  if (!(eps > 0.0 && eps < 0.125)) throw std::invalid_argument("eps must lie in (0, 1/8)");
  return static_cast<std::size_t>(std::floor(1.0 / (8.0 * eps) + 1e-9));
}

QuantileDistribution gen_unit_hill(double eps, std::size_t s) {
  if (s >= unit_hill_sites(eps)) throw std::invalid_argument("hill index out of range");
  const double h0 = 0.5 + 4.0 * static_cast<double>(s) * eps;
  const double h1 = 0.5 + 4.0 * static_cast<double>(s + 1) * eps;
  auto plateau = [](double q) { return 0.5 / q; };
  auto hill = [h0](double q) { return 0.5 * (q + 1.0 - h0) / q; };
  std::vector<Breakpoint> bps{{0.0, 1.0}, {0.5, 1.0}};
  add_piece(bps, 0.5, h0, plateau);
  add_piece(bps, h0, h1 - kJumpGap, hill);
  if (h1 < 1.0) {
    add_piece(bps, h1, 1.0, plateau);
  } else {
    bps.push_back({1.0, hill(1.0)});
  }
  return QuantileDistribution::curve(std::move(bps));
}

double unit_hill_peak_quantile(double eps, std::size_t s) {
  return 0.5 + 4.0 * static_cast<double>(s + 1) * eps - kJumpGap;
}

std::size_t geo_hill_sites(double eps, double H) {
  if (!(eps > 0.0) || !(H > 1.0)) throw std::invalid_argument("need eps > 0 and H > 1");
  const double x = std::log(H) / std::log1p(2.0 * eps);
  return static_cast<std::size_t>(std::ceil(x - 1e-12)) - 1;
}

QuantileDistribution gen_geo_hill(double eps, double H, std::size_t s) {
  if (s < 1 || s > geo_hill_sites(eps, H)) throw std::invalid_argument("hill index out of range");
  const double g0 = std::pow(1.0 + 2.0 * eps, static_cast<double>(s) - 1.0) / H;
  const double g1 = std::min(1.0, std::pow(1.0 + 2.0 * eps, static_cast<double>(s)) / H);
  const double hill_value = 1.0 / g0;
  auto plateau = [](double q) { return 1.0 / q; };
  std::vector<Breakpoint> bps{{0.0, H}, {1.0 / H, H}};
  add_piece(bps, 1.0 / H, g0, plateau);
  if (g0 > bps.back().q) bps.push_back({g0, hill_value});
  bps.push_back({g1 - kJumpGap, hill_value});
  if (g1 < 1.0) add_piece(bps, g1, 1.0, plateau);
  else bps.push_back({1.0, hill_value});
  return QuantileDistribution::curve(std::move(bps));
}

double geo_hill_peak_quantile(double eps, double H, std::size_t s) {
  return std::min(1.0, std::pow(1.0 + 2.0 * eps, static_cast<double>(s)) / H) - kJumpGap;
}

}  // namespace tsa
