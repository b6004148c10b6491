// SPDX-License-Identifier: Apache-2.0
#include "tsa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

#include "tsa/myerson.hpp"

namespace tsa {

double dskl(const QuantileDistribution& p, const QuantileDistribution& q) {
  if (!p.is_discrete() || !q.is_discrete()) throw std::invalid_argument("discretize first");
  std::map<double, std::pair<double, double>> masses;
  for (const Atom& a : p.atoms()) masses[a.value].first += a.mass;
  for (const Atom& a : q.atoms()) masses[a.value].second += a.mass;
  double total = 0.0;
  for (const auto& [v, pq] : masses) {
    const auto [pm, qm] = pq;
    if (pm == qm) continue;
    if (pm == 0.0 || qm == 0.0) {
      std::cerr << "warning: dskl support mismatch at value " << v << "\n";
      return std::numeric_limits<double>::infinity();
    }
    // Written as a product of two antisymmetric factors so swapping p and q
    // is bit-for-bit symmetric.
    total += (pm - qm) * (std::log(pm) - std::log(qm));
  }
  return total;
}

double dskl(const ProductPrior& p, const ProductPrior& q) {
  if (p.size() != q.size()) throw std::invalid_argument("priors differ in buyer count");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += dskl(p.buyers[i], q.buyers[i]);
  return total;
}

double bernstein_bound(double q, double a, double b, double N, double L) {
  return std::sqrt(std::max(0.0, 2.0 * (q - a) * (b - q) * L / N)) + L * (b - a) / N;
}

namespace {

std::vector<double> atom_virtuals(const QuantileDistribution& d) {
  if (!d.is_discrete()) throw std::invalid_argument("discretize first");
  const IronedCurve h = iron(revenue_curve(d));
  std::vector<double> out;
  for (double c : d.cumulative()) out.push_back(h.slope_at(c));
  return out;
}

double upper_from(const std::vector<double>& phis, const std::vector<double>& cum, double phi) {
  double best = 0.0;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (phis[k] >= phi) best = cum[k];
  }
  return best;
}

double lower_from(const std::vector<double>& phis, const std::vector<double>& cum, double phi) {
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (phis[k] <= phi) return k == 0 ? 0.0 : cum[k - 1];
  }
  return 1.0;
}

}  // namespace

double theta_upper(const QuantileDistribution& d, double phi) {
  return upper_from(atom_virtuals(d), d.cumulative(), phi);
}

double theta_lower(const QuantileDistribution& d, double phi) {
  return lower_from(atom_virtuals(d), d.cumulative(), phi);
}

ThetaVector theta_thresholds(const ProductPrior& prior, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t n = prior.size();
  ThetaVector out;
  out.opt = opt_revenue(prior);
  if (eps >= 1.0) {
    out.thetas.assign(n, 0.0);
    out.phi_star = std::numeric_limits<double>::infinity();
  } else {
    std::vector<std::vector<double>> phis;
    std::vector<double> candidates;
    for (const auto& d : prior.buyers) {
      phis.push_back(atom_virtuals(d));
      candidates.insert(candidates.end(), phis.back().begin(), phis.back().end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    auto log_product = [&](auto&& theta_of) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::log1p(-theta_of(i));
      return s;
    };
    const double log_eps = std::log(eps);
    // The product is nondecreasing in phi, so scan candidates from the top.
    double phi_star = candidates.front();
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
      const double phi = *it;
      const double lp = log_product([&](std::size_t i) {
        return upper_from(phis[i], prior.buyers[i].cumulative(), phi);
      });
      if (lp <= log_eps) {
        phi_star = phi;
        break;
      }
    }
    out.phi_star = phi_star;
    for (std::size_t i = 0; i < n; ++i) {
      out.thetas.push_back(upper_from(phis[i], prior.buyers[i].cumulative(), phi_star));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double keep = out.thetas[i];
      out.thetas[i] = lower_from(phis[i], prior.buyers[i].cumulative(), phi_star);
      const double lp = log_product([&](std::size_t j) { return out.thetas[j]; });
      if (!(lp < log_eps)) out.thetas[i] = keep;
    }
  }
  out.sum = 0.0;
  for (double t : out.thetas) out.sum += t;
  out.opt_truncated = opt_revenue(truncate_tail(prior, out.thetas));
  out.achieved_ratio = out.opt > 0.0 ? out.opt_truncated / out.opt : 1.0;
  return out;
}

SandwichReport verify_sandwich(const QuantileDistribution& d, const QuantileDistribution& learned,
                               const QuantileDistribution& shaded) {
  SandwichReport r;
  const double up = max_dominance_violation(d, learned);
  const double lo = max_dominance_violation(learned, shaded);
  r.dominates_upper = up <= kProbTol;
  r.dominates_lower = lo <= kProbTol;
  r.max_violation = std::max(up, lo);
  return r;
}

SandwichReport verify_sandwich(const QuantileDistribution& d, const QuantileDistribution& learned,
                               const ShadeParams& params) {
  return verify_sandwich(d, learned, shade_df_dist(d, params));
}

KlGapReport kl_revenue_gap(const ProductPrior& p1, const ProductPrior& p2, double K, double alpha,
                           double c) {
  if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
  KlGapReport r;
  r.dskl = dskl(p1, p2);
  r.threshold = c / K;
  r.alpha = alpha;
  r.opt_gap = std::abs(opt_revenue(p1) - opt_revenue(p2));
  r.below_threshold = r.dskl <= r.threshold;
  r.gap_within = r.opt_gap <= 2.0 * alpha + 1e-12;
  return r;
}

}  // namespace tsa
