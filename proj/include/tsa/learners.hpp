// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsa/myerson.hpp"
#include "tsa/oracle.hpp"
#include "tsa/quantile_dist.hpp"

namespace tsa {

struct ShadeParams {
  double N = 2.0;  // query budget scale
  std::size_t n = 1;
  double L = 1.0;
  double delta = 0.0;
  double c_log = 1.0;

  void validate() const;
};

/// Default log factor: ceil(ln(2 * N * n * 20)).
double default_L(double N, std::size_t n);

// Shading for exact queries and for the small-Delta hybrid learner.
double shade_f(double q, const ShadeParams& p);
double shade_df(double q, const ShadeParams& p);

// Shading for the interval learner (Delta >= 1/n).
double interval_f(double q, const ShadeParams& p);
double interval_sf(double q, const ShadeParams& p);
double interval_df(double q, const ShadeParams& p);

// Shading for the hybrid learner: q - min{f(q), Delta}, floored at 0.
double hybrid_sf(double q, const ShadeParams& p);

/// q_0 = 1, q_{j+1} = q_j - 2 f(q_j) while positive.
std::vector<double> pinpoints(const ShadeParams& p);

/// Applies shade_df to every positive support quantile of d.
QuantileDistribution shade_df_dist(const QuantileDistribution& d, const ShadeParams& p);

struct LearnResult {
  ProductPrior learned;
  AuctionRule rule;
  BudgetLedger budget;
  ShadeParams params;
  std::string learner;
};

LearnResult learn_pinpoint(Oracle& oracle, const ShadeParams& p);

/// Quantile intervals [0,D], [D,2D], [2D,4D], ... up to 1/2, mirrored above.
std::vector<std::pair<double, double>> doubling_intervals(double delta);

LearnResult learn_interval(Oracle& oracle, const ShadeParams& p);

/// Samples drawn in round j of the hybrid learner's boundary phase, where
/// a_j = j * Delta. Includes the c_log * L multiplier.
double hybrid_round_samples(std::size_t j, const ShadeParams& p);

LearnResult learn_hybrid(Oracle& oracle, const ShadeParams& p);

struct SingleResult {
  double reserve = 0.0;
  double quantile = 0.0;  // quantile at which the reserve was observed
  std::size_t probes = 0;  // distinct quantile points examined
  std::size_t rounds = 0;
  std::vector<std::pair<double, double>> intervals;  // concave search trace
  BudgetLedger budget;
};

SingleResult single_concave_search(Oracle& oracle, Family family, double eps,
                                   std::size_t n_per_point);
SingleResult single_grid_unit(Oracle& oracle, double eps);
SingleResult single_grid_geometric(Oracle& oracle, double eps, double H);

/// Posted-price rule for one buyer.
AuctionRule posted_price_rule(double price);

enum class LearnerKind {
  Pinpoint,
  Interval,
  Hybrid,
  SingleConcave,
  SingleGridUnit,
  SingleGridGeometric,
};

std::string to_string(LearnerKind k);

struct ChosenParams {
  ShadeParams params;
  LearnerKind learner = LearnerKind::Pinpoint;
  Family family = Family::Unknown;
  double eps = 0.1;
  double H = 0.0;
  double base = 0.0;  // the complexity rate before log factors
};

/// Parameter choice driven by the complexity table for (family, Delta).
/// L <= 0 selects default_L.
ChosenParams choose_params(Family family, double eps, std::size_t n, double delta,
                           double H = 0.0, double c_log = 1.0, double L = 0.0);

/// Runs the learner chosen by `choose_params`. Single-buyer learners return a
/// posted-price rule whose learned prior is a point mass at the reserve.
LearnResult learn(Oracle& oracle, const ChosenParams& chosen);

}  // namespace tsa
