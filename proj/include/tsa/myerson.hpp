// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tsa/quantile_dist.hpp"

namespace tsa {

/// Per-buyer lookup table: support values ascending with their ironed
/// virtual values (nondecreasing in value).
struct BuyerRule {
  std::vector<double> values;
  std::vector<double> virtuals;
  IronedCurve ironed;

  /// Index of the largest support value <= bid, or nullopt when the bid is
  /// below the whole support.
  std::optional<std::size_t> round_down(double bid) const;
};

/// Myerson's optimal auction for a product prior: the highest nonnegative
/// ironed virtual value wins, ties go to the lowest buyer index, and the
/// winner pays its critical bid.
struct AuctionRule {
  std::vector<BuyerRule> buyers;

  std::size_t size() const noexcept { return buyers.size(); }
  /// Single-buyer convenience: the smallest support value that wins.
  std::optional<double> posted_price() const;
};

struct Outcome {
  std::optional<std::size_t> winner;
  double payment = 0.0;
};

AuctionRule build_auction(const ProductPrior& prior);

Outcome run_auction(const AuctionRule& rule, std::span<const double> bids);

struct ExactMode {};
struct MonteCarloMode {
  std::uint64_t trials;
  std::uint64_t seed;
};

struct RevenueEstimate {
  double revenue;
  std::optional<double> stderr_;
};

/// Largest number of profiles exact enumeration accepts.
inline constexpr double kMaxProfiles = 1e7;

RevenueEstimate expected_revenue(const AuctionRule& rule, const ProductPrior& prior,
                                 ExactMode mode = {});
RevenueEstimate expected_revenue(const AuctionRule& rule, const ProductPrior& prior,
                                 MonteCarloMode mode);

/// Expected revenue of Myerson's auction built for `prior`, evaluated on it.
double opt_revenue(const ProductPrior& prior);

/// Expected virtual surplus: the probability-weighted ironed virtual value
/// of each profile's winner, computed by enumeration.
double expected_virtual_surplus(const AuctionRule& rule, const ProductPrior& prior);

}  // namespace tsa
