// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "tsa/learners.hpp"
#include "tsa/quantile_dist.hpp"

namespace tsa {

/// Symmetric KL divergence KL(P||Q) + KL(Q||P) over the union of supports.
/// Returns +infinity (and warns on stderr) when a value has zero mass on
/// exactly one side.
double dskl(const QuantileDistribution& p, const QuantileDistribution& q);

/// Sum of per-buyer divergences.
double dskl(const ProductPrior& p, const ProductPrior& q);

/// sqrt(2 (q-a) (b-q) L / N) + L (b-a) / N.
double bernstein_bound(double q, double a, double b, double N, double L);

struct ThetaVector {
  std::vector<double> thetas;
  double phi_star = 0.0;
  double sum = 0.0;
  double achieved_ratio = 1.0;  // opt(D_theta) / opt(D)
  double opt = 0.0;
  double opt_truncated = 0.0;
};

/// Largest support quantile whose ironed virtual value is at least phi (0 if
/// none), and the quantile just before the first atom whose ironed virtual
/// value is at most phi (1 if none).
double theta_upper(const QuantileDistribution& d, double phi);
double theta_lower(const QuantileDistribution& d, double phi);

/// Thresholds retaining a (1 - eps) share of the optimal revenue with small
/// total truncation mass: phi* is the largest ironed-virtual candidate with
/// prod(1 - theta_upper) <= eps, then a greedy pass lowers thresholds while
/// the product stays strictly below eps.
ThetaVector theta_thresholds(const ProductPrior& prior, double eps);

struct SandwichReport {
  bool dominates_upper = false;  // D dominates E~
  bool dominates_lower = false;  // E~ dominates the shaded D
  double max_violation = 0.0;
};

SandwichReport verify_sandwich(const QuantileDistribution& d, const QuantileDistribution& learned,
                               const QuantileDistribution& shaded);
SandwichReport verify_sandwich(const QuantileDistribution& d, const QuantileDistribution& learned,
                               const ShadeParams& params);

struct KlGapReport {
  double dskl = 0.0;
  double threshold = 0.0;  // c / K
  double opt_gap = 0.0;
  double alpha = 0.0;
  bool below_threshold = false;
  bool gap_within = false;  // opt_gap <= 2 alpha
};

KlGapReport kl_revenue_gap(const ProductPrior& p1, const ProductPrior& p2, double K, double alpha,
                           double c = 0.1);

}  // namespace tsa
