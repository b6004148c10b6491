// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tsa/oracle.hpp"

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

OracleConfig cfg(double delta, std::uint64_t seed = 1) {
  OracleConfig c;
  c.delta = delta;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(TargetedSample, PointMass) {
  Oracle o(single(QuantileDistribution::point_mass(7)), cfg(0.2));
  for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(o.targeted_sample(0, 0.1, 0.5), 7);
}

TEST(TargetedSample, NarrowIntervalRejected) {
  Oracle o(single(uniform_grid()), cfg(0.1));
  try {
    o.targeted_sample(0, 0.2, 0.25);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "interval narrower than targeting power");
  }
  EXPECT_EQ(o.ledger().total_samples(), 0U);
}

TEST(TargetedSample, OnlyEligibleValues) {
  Oracle o(single(uniform_grid()), cfg(0.1));
  for (int i = 0; i < 200; ++i) {
    const double v = o.targeted_sample(0, 0.3, 0.4);
    EXPECT_TRUE(v == 0.7 || v == 0.6) << v;
  }
}

TEST(TargetedSample, DeltaOneIsIidSampling) {
  Oracle o(single(uniform_grid()), cfg(1.0));
  EXPECT_NO_THROW(o.targeted_sample(0, 0.0, 1.0));
  EXPECT_THROW(o.targeted_sample(0, 0.0, 0.99), std::invalid_argument);
}

TEST(TargetedQuery, Examples) {
  Oracle o(single(uniform_grid()), cfg(0.0));
  EXPECT_DOUBLE_EQ(o.targeted_query(0, 0.35), 0.7);
  Oracle pm(single(QuantileDistribution::point_mass(7)), cfg(0.0));
  EXPECT_DOUBLE_EQ(pm.targeted_query(0, 0.5), 7);
}

TEST(TargetedQuery, UnavailableWithPositiveDelta) {
  Oracle o(single(uniform_grid()), cfg(0.1));
  try {
    o.targeted_query(0, 0.5);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "queries unavailable at this targeting power");
  }
  OracleConfig c = cfg(0.1);
  c.allow_query = true;
  Oracle allowed(single(uniform_grid()), c);
  EXPECT_DOUBLE_EQ(allowed.targeted_query(0, 0.35), 0.7);
}

TEST(DataHolder, AnswersFromEmpiricalDataset) {
  OracleConfig c = cfg(0.0, 5);
  c.mode = OracleMode::DataHolder;
  c.holder_m = 4;
  Oracle o(single(uniform_grid()), c);
  const QuantileDistribution& data = o.source(0);
  double total = 0;
  for (const Atom& a : data.atoms()) {
    total += a.mass;
    EXPECT_NEAR(std::fmod(a.mass * 4.0, 1.0), 0.0, 1e-12);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(o.targeted_query(0, 0.5), data.value_at(0.5));
}

TEST(DataHolder, EmpiricalQueryExample) {
  // Dataset [0.9, 0.5, 0.5, 0.1] as a discrete prior whose holder sees it
  // exactly: the empirical interval (0.25, 0.75] owns 0.5.
  const auto data = from_samples(std::vector<double>{0.9, 0.5, 0.5, 0.1});
  Oracle o(single(data), cfg(0.0));
  EXPECT_DOUBLE_EQ(o.targeted_query(0, 0.5), 0.5);
}

TEST(Oracle, DeterministicPerBuyerStreams) {
  ProductPrior p;
  p.buyers = {uniform_grid(), uniform_grid()};
  Oracle a(p, cfg(0.1, 77));
  Oracle b(p, cfg(0.1, 77));
  std::vector<double> xa;
  std::vector<double> xb;
  // Interleave differently; per-buyer sequences must agree.
  for (int i = 0; i < 50; ++i) xa.push_back(a.targeted_sample(0, 0.0, 0.5));
  for (int i = 0; i < 50; ++i) a.targeted_sample(1, 0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    b.targeted_sample(1, 0.0, 0.5);
    xb.push_back(b.targeted_sample(0, 0.0, 0.5));
  }
  EXPECT_EQ(xa, xb);
}

TEST(Oracle, LedgerCountsUnderConcurrency) {
  ProductPrior p;
  p.buyers = {uniform_grid(), uniform_grid(), uniform_grid()};
  Oracle o(p, cfg(0.0));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < 3; ++i) {
    pool.emplace_back([&o, i] {
      for (int k = 0; k < 1000; ++k) {
        o.targeted_sample(i, 0.0, 1.0);
        o.targeted_query(i, 0.5);
      }
    });
  }
  for (auto& t : pool) t.join();
  const BudgetLedger l = o.ledger();
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(l.samples[i], 1000U);
    EXPECT_EQ(l.queries[i], 1000U);
  }
}

TEST(Oracle, ConditionalLaw) {
  const auto d = QuantileDistribution::discrete({{3, 0.2}, {2, 0.3}, {1, 0.5}});
  Oracle o(single(d), cfg(0.0, 3));
  const int m = 100000;
  std::map<double, int> counts;
  for (int i = 0; i < m; ++i) ++counts[o.targeted_sample(0, 0.1, 0.6)];
  // Conditional masses on [0.1, 0.6]: 3 -> 0.1, 2 -> 0.3, 1 -> 0.1 (of 0.5).
  const std::map<double, double> want{{3, 0.2}, {2, 0.6}, {1, 0.2}};
  for (const auto& [v, p] : want) {
    const double se = std::sqrt(p * (1 - p) / m);
    EXPECT_NEAR(counts[v] / static_cast<double>(m), p, 4 * se) << v;
  }
}
