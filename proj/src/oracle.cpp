// SPDX-License-Identifier: Apache-2.0
#include "tsa/oracle.hpp"

#include <numeric>
#include <stdexcept>

#include "tsa/rng.hpp"

namespace tsa {

namespace {
constexpr std::uint64_t kHolderStream = 1ULL << 32;
constexpr double kWidthTol = 1e-12;
constexpr double kMinQuantile = 1e-15;
}  // namespace

std::uint64_t BudgetLedger::total_samples() const {
  return std::accumulate(samples.begin(), samples.end(), std::uint64_t{0});
}

std::uint64_t BudgetLedger::total_queries() const {
  return std::accumulate(queries.begin(), queries.end(), std::uint64_t{0});
}

Oracle::Oracle(ProductPrior prior, OracleConfig config) : config_(config) {
  if (prior.buyers.empty()) throw std::invalid_argument("oracle needs at least one buyer");
  if (!(config_.delta >= 0.0 && config_.delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in [0,1]");
  }
  const std::size_t n = prior.size();
  if (config_.mode == OracleMode::DataHolder) {
    if (config_.holder_m < 1) throw std::invalid_argument("data holder needs m >= 1");
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> data(config_.holder_m);
      for (std::size_t k = 0; k < data.size(); ++k) {
        const double u = counter_uniform(config_.seed, kHolderStream + i, k);
        data[k] = prior.buyers[i].value_at(1.0 - u);
      }
      sources_.push_back(from_samples(data));
    }
  } else {
    sources_ = std::move(prior.buyers);
  }
  calls_ = std::make_unique<std::atomic<std::uint64_t>[]>(n);
  samples_ = std::make_unique<std::atomic<std::uint64_t>[]>(n);
  queries_ = std::make_unique<std::atomic<std::uint64_t>[]>(n);
}

double Oracle::targeted_sample(std::size_t buyer, double a, double b) {
  if (buyer >= size()) throw std::out_of_range("buyer index out of range");
  if (!(a >= 0.0 && a < b && b <= 1.0)) throw std::invalid_argument("interval must satisfy 0 <= a < b <= 1");
  if (b - a < config_.delta - kWidthTol) {
    throw std::invalid_argument("interval narrower than targeting power");
  }
  const std::uint64_t call = calls_[buyer].fetch_add(1, std::memory_order_relaxed);
  const double u = counter_uniform(config_.seed, buyer, call);
  double q = a + u * (b - a);
  if (q <= 0.0) q = kMinQuantile;
  samples_[buyer].fetch_add(1, std::memory_order_relaxed);
  return sources_[buyer].value_at(q);
}

double Oracle::targeted_query(std::size_t buyer, double q) {
  if (buyer >= size()) throw std::out_of_range("buyer index out of range");
  if (!can_query()) throw std::invalid_argument("queries unavailable at this targeting power");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("query quantile must lie in (0,1]");
  calls_[buyer].fetch_add(1, std::memory_order_relaxed);
  queries_[buyer].fetch_add(1, std::memory_order_relaxed);
  return sources_[buyer].value_at(q);
}

BudgetLedger Oracle::ledger() const {
  BudgetLedger l;
  for (std::size_t i = 0; i < size(); ++i) {
    l.samples.push_back(samples_[i].load());
    l.queries.push_back(queries_[i].load());
  }
  return l;
}

}  // namespace tsa
