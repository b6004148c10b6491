// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "tsa/quantile_dist.hpp"

namespace tsa {

enum class OracleMode { ExactDistribution, DataHolder };

struct OracleConfig {
  double delta = 0.0;
  OracleMode mode = OracleMode::ExactDistribution;
  std::size_t holder_m = 0;  // samples per buyer in DataHolder mode
  std::uint64_t seed = 0;
  bool allow_query = false;  // permit exact queries even when delta > 0
};

struct BudgetLedger {
  std::vector<std::uint64_t> samples;
  std::vector<std::uint64_t> queries;

  std::uint64_t total_samples() const;
  std::uint64_t total_queries() const;
};

/// Targeted access to each buyer's prior. Thread-safe: the value returned by
/// a call depends only on (seed, buyer, that buyer's call index).
class Oracle {
 public:
  Oracle(ProductPrior prior, OracleConfig config);

  std::size_t size() const noexcept { return sources_.size(); }
  double delta() const noexcept { return config_.delta; }
  const OracleConfig& config() const noexcept { return config_; }
  bool can_query() const noexcept { return config_.delta == 0.0 || config_.allow_query; }

  /// A value drawn conditionally on its quantile lying in [a, b].
  double targeted_sample(std::size_t buyer, double a, double b);

  /// The value at quantile q exactly.
  double targeted_query(std::size_t buyer, double q);

  BudgetLedger ledger() const;

  /// The distribution answers come from (the dataset in DataHolder mode).
  const QuantileDistribution& source(std::size_t buyer) const { return sources_.at(buyer); }

 private:
  OracleConfig config_;
  std::vector<QuantileDistribution> sources_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> calls_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> samples_;
  std::unique_ptr<std::atomic<std::uint64_t>[]> queries_;
};

}  // namespace tsa
