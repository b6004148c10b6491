// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tsa/experiment.hpp"
#include "tsa/generators.hpp"
#include "tsa/myerson.hpp"
#include "tsa/rng.hpp"

using namespace tsa;

namespace {

QuantileDistribution uniform_grid() {
  std::vector<Atom> atoms;
  for (int k = 1; k <= 10; ++k) atoms.push_back({k / 10.0, 0.1});
  return QuantileDistribution::discrete(atoms);
}

ProductPrior single(QuantileDistribution d) {
  ProductPrior p;
  p.buyers.push_back(std::move(d));
  return p;
}

ProductPrior point_masses(std::vector<double> vs) {
  ProductPrior p;
  for (double v : vs) p.buyers.push_back(QuantileDistribution::point_mass(v));
  return p;
}

}  // namespace

TEST(BuildAuction, UniformGridPostsHalf) {
  EXPECT_DOUBLE_EQ(*build_auction(single(uniform_grid())).posted_price(), 0.5);
}

TEST(BuildAuction, PointMassPostsItsValue) {
  EXPECT_DOUBLE_EQ(*build_auction(point_masses({1})).posted_price(), 1.0);
}

TEST(BuildAuction, CurveNeedsDiscretization) {
  try {
    build_auction(single(QuantileDistribution::curve({{0, 1}, {1, 0}})));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "discretize first");
  }
}

TEST(RunAuction, PostedPriceExamples) {
  const auto rule = build_auction(single(uniform_grid()));
  const double hi = 0.7;
  const Outcome o = run_auction(rule, std::span(&hi, 1));
  ASSERT_TRUE(o.winner);
  EXPECT_EQ(*o.winner, 0U);
  EXPECT_DOUBLE_EQ(o.payment, 0.5);
  const double lo = 0.3;
  const Outcome none = run_auction(rule, std::span(&lo, 1));
  EXPECT_FALSE(none.winner);
  EXPECT_EQ(none.payment, 0.0);
}

TEST(RunAuction, HigherVirtualWins) {
  const auto rule = build_auction(point_masses({1, 2}));
  const std::vector<double> bids{1, 2};
  const Outcome o = run_auction(rule, bids);
  ASSERT_TRUE(o.winner);
  EXPECT_EQ(*o.winner, 1U);
  EXPECT_DOUBLE_EQ(o.payment, 2.0);
}

TEST(RunAuction, TiesGoToLowestIndex) {
  const auto rule = build_auction(point_masses({1, 1}));
  const std::vector<double> bids{1, 1};
  const Outcome o = run_auction(rule, bids);
  EXPECT_EQ(*o.winner, 0U);
  EXPECT_DOUBLE_EQ(o.payment, 1.0);
}

TEST(RunAuction, BidBelowSupportNeverWins) {
  const auto rule = build_auction(point_masses({1}));
  const double bid = 0.5;
  EXPECT_FALSE(run_auction(rule, std::span(&bid, 1)).winner);
}

TEST(RunAuction, LengthMismatchIsError) {
  const auto rule = build_auction(point_masses({1, 2}));
  const std::vector<double> bids{1};
  EXPECT_THROW(run_auction(rule, bids), std::invalid_argument);
}

TEST(ExpectedRevenue, Examples) {
  EXPECT_DOUBLE_EQ(opt_revenue(point_masses({1, 1})), 1.0);
  EXPECT_NEAR(opt_revenue(single(uniform_grid())), 0.30, 1e-12);
  EXPECT_NEAR(opt_revenue(single(QuantileDistribution::discrete({{5, 0.25}, {4, 0.05}, {1, 0.7}}))), 1.25,
              1e-12);
}

TEST(ExpectedRevenue, MatchesBestPostedPriceForOneBuyer) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto p = gen_family(Family::Unit01, {1, 12, 0}, seed);
    EXPECT_NEAR(opt_revenue(p), best_posted_price(p.buyers[0]).revenue, 1e-12) << seed;
  }
}

TEST(ExpectedRevenue, MonteCarloAgreesWithExact) {
  const auto p = single(uniform_grid());
  const auto rule = build_auction(p);
  const RevenueEstimate mc = expected_revenue(rule, p, MonteCarloMode{100000, 17});
  ASSERT_TRUE(mc.stderr_);
  EXPECT_NEAR(mc.revenue, 0.30, 3.0 * *mc.stderr_);
}

TEST(ExpectedRevenue, EnumerationCapIsEnforced) {
  ProductPrior p;
  for (int i = 0; i < 8; ++i) p.buyers.push_back(uniform_grid());
  try {
    expected_revenue(build_auction(p), p);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("MonteCarlo"), std::string::npos);
  }
}

TEST(Properties, RevenueEqualsVirtualSurplus) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = gen_family(Family::Unit01, {1 + seed % 3, 6, 0}, seed);
    const auto rule = build_auction(p);
    EXPECT_NEAR(expected_revenue(rule, p).revenue, expected_virtual_surplus(rule, p), 1e-9) << seed;
  }
}

TEST(Properties, RevenueMonotonicity) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto d = gen_family(Family::Unit01, {1 + seed % 3, 6, 0}, seed);
    const auto dp = random_dominated(d, seed + 1000);
    ASSERT_TRUE(dominates(d, dp));
    const auto rule = build_auction(dp);
    EXPECT_GE(expected_revenue(rule, d).revenue, expected_revenue(rule, dp).revenue - 1e-9);
    EXPECT_GE(opt_revenue(d), opt_revenue(dp) - 1e-9);
  }
}

TEST(Properties, TruthfulAndIndividuallyRational) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = gen_family(Family::Unit01, {3, 5, 0}, seed);
    const auto rule = build_auction(p);
    CounterStream rng(seed, 99);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> vals(3);
      for (std::size_t i = 0; i < 3; ++i) {
        vals[i] = p.buyers[i].value_at(1.0 - rng.uniform());
      }
      const Outcome truth = run_auction(rule, vals);
      if (truth.winner) EXPECT_LE(truth.payment, vals[*truth.winner] + 1e-12);
      for (std::size_t i = 0; i < 3; ++i) {
        const double u_truth = truth.winner == i ? vals[i] - truth.payment : 0.0;
        for (const Atom& dev : p.buyers[i].atoms()) {
          std::vector<double> bids = vals;
          bids[i] = dev.value;
          const Outcome o = run_auction(rule, bids);
          const double u_dev = o.winner == i ? vals[i] - o.payment : 0.0;
          EXPECT_GE(u_truth, u_dev - 1e-9);
        }
      }
    }
  }
}
