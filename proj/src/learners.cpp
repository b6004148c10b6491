// SPDX-License-Identifier: Apache-2.0
#include "tsa/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <optional>
#include <stdexcept>

namespace tsa {

namespace {

// A quantile range [lo, hi] of the prior, represented by the samples drawn
// from it; each sample carries weight (hi - lo) / samples.size().
struct Stratum {
  double weight;
  std::vector<double> samples;
};

QuantileDistribution stratified_empirical(const std::vector<Stratum>& strata) {
  std::vector<std::pair<double, long double>> pts;
  for (const Stratum& s : strata) {
    if (s.samples.empty()) continue;
    const long double w = static_cast<long double>(s.weight) / s.samples.size();
    for (double v : s.samples) pts.emplace_back(v, w);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> vs;
  std::vector<double> qs;
  long double run = 0.0L;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    run += pts[i].second;
    if (i + 1 < pts.size() && pts[i + 1].first == pts[i].first) continue;
    vs.push_back(pts[i].first);
    qs.push_back(static_cast<double>(std::min(run, 1.0L)));
  }
  qs.back() = 1.0;
  return QuantileDistribution::from_quantiles(vs, qs);
}

LearnResult finish(Oracle& oracle, ProductPrior learned, const ShadeParams& p,
                   const char* name) {
  LearnResult r;
  r.rule = build_auction(learned);
  r.learned = std::move(learned);
  r.budget = oracle.ledger();
  r.params = p;
  r.learner = name;
  return r;
}

// Interval [q - w/2, q + w/2] kept inside [0,1] without shrinking below w.
std::pair<double, double> centered_interval(double q, double w) {
  w = std::min(w, 1.0);
  double a = q - w / 2.0;
  double b = q + w / 2.0;
  if (a < 0.0) {
    b -= a;
    a = 0.0;
  }
  if (b > 1.0) {
    a -= b - 1.0;
    b = 1.0;
  }
  return {std::max(a, 0.0), b};
}

double probe_value(Oracle& oracle, double q, double width) {
  if (width <= 0.0 && oracle.can_query()) return oracle.targeted_query(0, q);
  const auto [a, b] = centered_interval(q, std::max(width, oracle.delta()));
  return oracle.targeted_sample(0, a, b);
}

void require_single(const Oracle& oracle) {
  if (oracle.size() != 1) throw std::invalid_argument("single-buyer learner needs n = 1");
}

}  // namespace

void ShadeParams::validate() const {
  if (!(N >= 2.0)) throw std::invalid_argument("N must be at least 2");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
  if (!(c_log > 0.0)) throw std::invalid_argument("c_log must be positive");
}

double default_L(double N, std::size_t n) {
  return std::ceil(std::log(2.0 * N * static_cast<double>(n) * 20.0));
}

double shade_f(double q, const ShadeParams& p) {
  if (q > 0.5) q = 1.0 - q;
  const double n = static_cast<double>(p.n);
  const double floor_term = 1.0 / (p.N * p.N * n);
  if (q <= 1.0 / n) return std::sqrt(q / n) / p.N + floor_term;
  return q / p.N + floor_term;
}

double shade_df(double q, const ShadeParams& p) {
  return std::max(0.0, q - 2.0 * shade_f(q, p));
}

double interval_f(double q, const ShadeParams& p) {
  if (q > 0.5) q = 1.0 - q;
  if (q <= p.delta) return 2.0 * std::sqrt(q * p.L * p.delta / p.N);
  return 2.0 * std::sqrt(p.L / p.N) * q;
}

double interval_sf(double q, const ShadeParams& p) {
  return std::max(0.0, q - interval_f(q, p) - 4.0 * p.L * p.delta / p.N);
}

double interval_df(double q, const ShadeParams& p) {
  return std::max(0.0, q - 2.0 * interval_f(q, p) - 5.0 * p.L * p.delta / p.N);
}

double hybrid_sf(double q, const ShadeParams& p) {
  return std::max(0.0, q - std::min(shade_f(q, p), p.delta));
}

std::vector<double> pinpoints(const ShadeParams& p) {
  p.validate();
  std::vector<double> qs{1.0};
  while (true) {
    const double next = qs.back() - 2.0 * shade_f(qs.back(), p);
    if (next <= 0.0) break;
    qs.push_back(next);
  }
  return qs;
}

QuantileDistribution shade_df_dist(const QuantileDistribution& d, const ShadeParams& p) {
  return shade_quantiles(d, [&p](double q) { return shade_df(q, p); });
}

LearnResult learn_pinpoint(Oracle& oracle, const ShadeParams& p) {
  if (!oracle.can_query()) throw std::invalid_argument("queries unavailable at this targeting power");
  const std::vector<double> qs = pinpoints(p);
  const std::size_t k = qs.size() - 1;
  ProductPrior learned;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    // Ordered by decreasing value: v_k at q_k first, v_0 = 0 at q_0 = 1 last.
    std::vector<double> vs(k + 1);
    std::vector<double> quant(k + 1);
    for (std::size_t j = 1; j <= k; ++j) {
      vs[k - j] = oracle.targeted_query(i, qs[j]);
      quant[k - j] = qs[j];
    }
    vs[k] = 0.0;
    quant[k] = 1.0;
    // Queries at decreasing quantiles return nondecreasing values.
    for (std::size_t t = k; t-- > 0;) vs[t] = std::max(vs[t], vs[t + 1]);
    learned.buyers.push_back(QuantileDistribution::from_quantiles(vs, quant));
  }
  return finish(oracle, std::move(learned), p, "pinpoint");
}

std::vector<std::pair<double, double>> doubling_intervals(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (delta > 0.5) return {{0.0, 1.0}};
  std::vector<double> edges{0.0};
  for (double next = delta; next < 0.5; next *= 2.0) edges.push_back(next);
  // A last piece narrower than delta joins its neighbor.
  if (edges.size() > 1 && 0.5 - edges.back() < delta) edges.pop_back();
  edges.push_back(0.5);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) out.emplace_back(edges[k], edges[k + 1]);
  for (std::size_t k = edges.size() - 1; k-- > 0;) {
    out.emplace_back(1.0 - edges[k + 1], 1.0 - edges[k]);
  }
  return out;
}

LearnResult learn_interval(Oracle& oracle, const ShadeParams& p) {
  p.validate();
  const double n = static_cast<double>(p.n);
  if (p.delta < 1.0 / n - 1e-12) throw std::invalid_argument("use learn_hybrid");
  if (oracle.delta() > p.delta + 1e-12) {
    throw std::invalid_argument("oracle targeting power exceeds learner delta");
  }
  if (!(p.N > 16.0 * p.L)) {
    throw std::invalid_argument("interval shading needs N > 16 L to stay monotone");
  }
  const auto intervals = doubling_intervals(p.delta);
  const auto per_interval = static_cast<std::size_t>(std::ceil(p.N));
  ProductPrior learned;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    std::vector<Stratum> strata;
    for (const auto& [a, b] : intervals) {
      Stratum s{b - a, {}};
      s.samples.reserve(per_interval);
      for (std::size_t t = 0; t < per_interval; ++t) s.samples.push_back(oracle.targeted_sample(i, a, b));
      strata.push_back(std::move(s));
    }
    const QuantileDistribution e = stratified_empirical(strata);
    learned.buyers.push_back(shade_quantiles(e, [&p](double q) { return interval_sf(q, p); }));
  }
  return finish(oracle, std::move(learned), p, "interval");
}

double hybrid_round_samples(std::size_t j, const ShadeParams& p) {
  if (j == 0) throw std::invalid_argument("rounds start at 1");
  const double n = static_cast<double>(p.n);
  const double jd = static_cast<double>(j);
  const double head = 4.0 * p.N * p.N * n * p.delta;
  double base;
  if (j == 1) {
    base = head;
  } else if (jd * p.delta <= 1.0 / n) {
    const double gap = std::sqrt(jd) - std::sqrt(jd - 1.0);
    base = head * gap * gap + std::sqrt(head / (jd - 1.0));
  } else {
    base = p.N * p.N / (jd * (jd - 1.0)) + 2.0 * p.N / (jd - 1.0);
  }
  return std::max(1.0, std::ceil(p.c_log * p.L * base));
}

LearnResult learn_hybrid(Oracle& oracle, const ShadeParams& p) {
  p.validate();
  const double n = static_cast<double>(p.n);
  if (p.delta == 0.0) throw std::invalid_argument("use learn_pinpoint");
  if (p.delta >= 1.0 / n) throw std::invalid_argument("use learn_interval");
  if (oracle.delta() > p.delta + 1e-12) {
    throw std::invalid_argument("oracle targeting power exceeds learner delta");
  }
  // Boundary rounds: [a_{j-1}, a_j] until a_j reaches 1/2 or f(a_j) >= delta.
  std::vector<std::pair<double, double>> rounds;
  double a = 0.0;
  for (std::size_t j = 1;; ++j) {
    double b = a + p.delta;
    if (0.5 - b < p.delta) b = 0.5;
    rounds.emplace_back(a, b);
    a = b;
    if (a >= 0.5 || shade_f(a, p) >= p.delta) break;
  }
  const double aj = a;
  // Interior sweep from 1 - a_J down to a_J with step f.
  std::vector<double> interior;
  if (aj < 0.5) {
    interior.push_back(1.0 - aj);
    while (true) {
      const double next = interior.back() - shade_f(interior.back(), p);
      if (next < aj) break;
      interior.push_back(next);
    }
  }

  ProductPrior learned;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    std::vector<Stratum> strata;
    for (std::size_t j = 0; j < rounds.size(); ++j) {
      const auto [lo, hi] = rounds[j];
      const auto count = static_cast<std::size_t>(hybrid_round_samples(j + 1, p));
      Stratum bottom{hi - lo, {}};
      Stratum top{hi - lo, {}};
      for (std::size_t t = 0; t < count; ++t) bottom.samples.push_back(oracle.targeted_sample(i, lo, hi));
      for (std::size_t t = 0; t < count; ++t) {
        top.samples.push_back(oracle.targeted_sample(i, 1.0 - hi, 1.0 - lo));
      }
      strata.push_back(std::move(bottom));
      strata.push_back(std::move(top));
    }
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const double qk = interior[k];
      const double next = k + 1 < interior.size() ? interior[k + 1] : aj;
      if (qk - next <= 0.0) continue;
      strata.push_back({qk - next, {oracle.targeted_sample(i, qk - p.delta, qk)}});
    }
    const QuantileDistribution e = stratified_empirical(strata);
    learned.buyers.push_back(shade_quantiles(e, [&p](double q) { return hybrid_sf(q, p); }));
  }
  return finish(oracle, std::move(learned), p, "hybrid");
}

AuctionRule posted_price_rule(double price) {
  ProductPrior prior;
  prior.buyers.push_back(QuantileDistribution::point_mass(price));
  return build_auction(prior);
}

SingleResult single_concave_search(Oracle& oracle, Family family, double eps,
                                   std::size_t n_per_point) {
  require_single(oracle);
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (n_per_point < 1) throw std::invalid_argument("need at least one sample per point");
  double qt;
  if (family == Family::Regular) qt = eps;
  else if (family == Family::MHR) qt = 1.0 / std::numbers::e;
  else throw std::invalid_argument("concave search needs a regular or MHR family");

  const bool exact = oracle.delta() == 0.0;
  std::map<double, double> cache;
  auto estimate = [&](double q) {
    if (auto it = cache.find(q); it != cache.end()) return it->second;
    double v;
    if (exact) {
      v = oracle.targeted_query(0, q);
    } else {
      std::vector<double> xs(n_per_point);
      const auto [lo, hi] = centered_interval(q, oracle.delta());
      for (double& x : xs) x = oracle.targeted_sample(0, lo, hi);
      std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
      v = xs[xs.size() / 2];
    }
    cache.emplace(q, v);
    return v;
  };

  double a = qt;
  double b = 1.0 - qt;
  SingleResult r;
  r.intervals.emplace_back(a, b);
  while (b - a > eps) {
    const double w = b - a;
    double best_q = a;
    double best_r = -1.0;
    for (int m = 0; m <= 4; ++m) {
      const double q = m == 4 ? b : a + w * m / 4.0;
      const double rev = q * estimate(q);
      if (rev > best_r) {
        best_r = rev;
        best_q = q;
      }
    }
    a = std::max(a, best_q - w / 4.0);
    b = std::min(b, best_q + w / 4.0);
    r.intervals.emplace_back(a, b);
    ++r.rounds;
  }
  const double q = std::clamp(0.5, a, b);
  r.reserve = estimate(q);
  r.quantile = q;
  r.probes = cache.size();
  r.budget = oracle.ledger();
  return r;
}

SingleResult single_grid_unit(Oracle& oracle, double eps) {
  require_single(oracle);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  const double d = eps / 4.0;
  const double e = oracle.delta() == 0.0 ? 0.0 : eps / 8.0;
  const auto count = static_cast<std::size_t>(std::floor(1.0 / d + 1e-9));
  SingleResult r;
  double best = -1.0;
  for (std::size_t k = 1; k <= count; ++k) {
    const double q = std::min(1.0, static_cast<double>(k) * d);
    const double v = probe_value(oracle, q, 2.0 * e);
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("value outside [0,1]");
    if (q * v > best) {
      best = q * v;
      r.reserve = v;
      r.quantile = q;
    }
  }
  r.probes = count;
  r.budget = oracle.ledger();
  return r;
}

SingleResult single_grid_geometric(Oracle& oracle, double eps, double H) {
  require_single(oracle);
  if (!(H > 1.0)) throw std::invalid_argument("H must exceed 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  const double ratio = 1.0 + eps / 8.0;
  const double half_width = oracle.delta() == 0.0 ? 0.0 : eps / (8.0 * H);
  SingleResult r;
  double best = -1.0;
  for (std::size_t i = 1;; ++i) {
    const double q = std::pow(ratio, static_cast<double>(i - 1)) / H;
    if (q > 1.0 + 1e-12) break;
    const double qc = std::min(q, 1.0);
    const double v = probe_value(oracle, qc, 2.0 * half_width);
    ++r.probes;
    if (qc * v > best) {
      best = qc * v;
      r.reserve = v;
      r.quantile = qc;
    }
  }
  r.budget = oracle.ledger();
  return r;
}

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::Pinpoint: return "pinpoint";
    case LearnerKind::Interval: return "interval";
    case LearnerKind::Hybrid: return "hybrid";
    case LearnerKind::SingleConcave: return "single_concave";
    case LearnerKind::SingleGridUnit: return "single_grid_unit";
    case LearnerKind::SingleGridGeometric: return "single_grid_geometric";
  }
  return "unknown";
}

ChosenParams choose_params(Family family, double eps, std::size_t n, double delta,
                           double H, double c_log, double L) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
  if (family == Family::OneToH && !(H > 1.0)) throw std::invalid_argument("H must exceed 1");
  const double nd = static_cast<double>(n);
  const bool wide = delta > 0.0 && delta >= 1.0 / nd - 1e-12;

  double base;
  if (wide) {
    switch (family) {
      case Family::Unit01:
      case Family::MHR: base = std::max(1.0 / eps, nd * delta / (eps * eps)); break;
      case Family::Regular:
        base = std::max(std::pow(eps, -1.5), nd * delta / (eps * eps * eps));
        break;
      case Family::OneToH: base = std::max(std::sqrt(H) / eps, nd * delta * H / (eps * eps)); break;
      default: throw std::invalid_argument("unknown family");
    }
  } else {
    // Revenue floor p of the family after truncation; N scales as p^{-1/2}/eps.
    double floor_p;
    switch (family) {
      case Family::Unit01: floor_p = 1.0; break;
      case Family::Regular: floor_p = eps / 8.0; break;
      case Family::MHR: floor_p = 1.0 / std::log(2.0 / eps); break;
      case Family::OneToH: floor_p = 1.0 / H; break;
      default: throw std::invalid_argument("unknown family");
    }
    base = 1.0 / (std::sqrt(floor_p) * eps);
  }

  ChosenParams c;
  c.family = family;
  c.eps = eps;
  c.H = H;
  c.base = base;
  c.params.n = n;
  c.params.delta = delta;
  c.params.c_log = c_log;
  c.params.N = std::max(2.0, std::ceil(c_log * base * std::ceil(std::log(nd / eps))));
  c.params.L = L > 0.0 ? L : default_L(c.params.N, n);
  if (wide && n > 1) {
    // The interval shading is only monotone once N > 16 L.
    while (!(c.params.N > 16.0 * c.params.L)) {
      c.params.N = std::floor(16.0 * c.params.L) + 1.0;
      if (!(L > 0.0)) c.params.L = default_L(c.params.N, n);
    }
  }

  if (n == 1) {
    switch (family) {
      case Family::Regular:
      case Family::MHR: c.learner = LearnerKind::SingleConcave; break;
      case Family::Unit01: c.learner = LearnerKind::SingleGridUnit; break;
      default: c.learner = LearnerKind::SingleGridGeometric; break;
    }
  } else if (delta == 0.0) {
    c.learner = LearnerKind::Pinpoint;
  } else if (wide) {
    c.learner = LearnerKind::Interval;
  } else {
    c.learner = LearnerKind::Hybrid;
  }
  return c;
}

LearnResult learn(Oracle& oracle, const ChosenParams& chosen) {
  auto single = [&](const SingleResult& s, const char* name) {
    LearnResult r;
    r.learned.family = Family::Unknown;
    r.learned.buyers.push_back(QuantileDistribution::point_mass(s.reserve));
    r.rule = posted_price_rule(s.reserve);
    r.budget = s.budget;
    r.params = chosen.params;
    r.learner = name;
    return r;
  };
  switch (chosen.learner) {
    case LearnerKind::Pinpoint: return learn_pinpoint(oracle, chosen.params);
    case LearnerKind::Interval: return learn_interval(oracle, chosen.params);
    case LearnerKind::Hybrid: return learn_hybrid(oracle, chosen.params);
    case LearnerKind::SingleConcave: {
      const auto per_point = static_cast<std::size_t>(chosen.params.N);
      return single(single_concave_search(oracle, chosen.family, chosen.eps, per_point),
                    "single_concave");
    }
    case LearnerKind::SingleGridUnit:
      return single(single_grid_unit(oracle, chosen.eps), "single_grid_unit");
    case LearnerKind::SingleGridGeometric:
      return single(single_grid_geometric(oracle, chosen.eps, chosen.H), "single_grid_geometric");
  }
  throw std::logic_error("unhandled learner");
}

}  // namespace tsa
