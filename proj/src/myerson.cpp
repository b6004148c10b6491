// SPDX-License-Identifier: Apache-2.0
#include "tsa/myerson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsa/rng.hpp"

namespace tsa {

namespace {

struct Bid {
  bool eligible;
  double phi;
};

// Visits every value profile of a discrete product prior together with its
// probability. Profiles are indices into each buyer's atom list.
template <typename Visit>
void enumerate_profiles(const ProductPrior& prior, Visit&& visit) {
  if (!prior.all_discrete()) throw std::invalid_argument("discretize first");
  double count = 1.0;
  for (const auto& b : prior.buyers) count *= static_cast<double>(b.support_size());
  if (count > kMaxProfiles) {
    throw std::runtime_error("profile enumeration exceeds 1e7; use MonteCarlo mode");
  }
  const std::size_t n = prior.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> bids(n);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& a = prior.buyers[i].atoms()[idx[i]];
      bids[i] = a.value;
      p *= a.mass;
    }
    visit(std::span<const double>(bids), p);
    std::size_t i = 0;
    while (i < n) {
      if (++idx[i] < prior.buyers[i].support_size()) break;
      idx[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
}

}  // namespace

std::optional<std::size_t> BuyerRule::round_down(double bid) const {
  auto it = std::upper_bound(values.begin(), values.end(), bid);
  if (it == values.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin()) - 1;
}

std::optional<double> AuctionRule::posted_price() const {
  if (buyers.size() != 1) throw std::invalid_argument("posted price needs exactly one buyer");
  const BuyerRule& b = buyers.front();
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    if (b.virtuals[k] >= 0.0) return b.values[k];
  }
  return std::nullopt;
}

AuctionRule build_auction(const ProductPrior& prior) {
  if (prior.buyers.empty()) throw std::invalid_argument("product prior has no buyers");
  AuctionRule rule;
  for (const auto& d : prior.buyers) {
    if (!d.is_discrete()) throw std::invalid_argument("discretize first");
    BuyerRule br;
    br.ironed = iron(revenue_curve(d));
    const auto& atoms = d.atoms();
    for (std::size_t k = atoms.size(); k-- > 0;) {
      br.values.push_back(atoms[k].value);
      br.virtuals.push_back(br.ironed.slope_at(d.cumulative()[k]));
    }
    rule.buyers.push_back(std::move(br));
  }
  return rule;
}

Outcome run_auction(const AuctionRule& rule, std::span<const double> bids) {
  const std::size_t n = rule.size();
  if (bids.size() != n) throw std::invalid_argument("bid count does not match buyer count");
  std::vector<Bid> b(n);
  std::optional<std::size_t> winner;
  for (std::size_t i = 0; i < n; ++i) {
    if (bids[i] < 0.0) throw std::invalid_argument("negative bid");
    const auto k = rule.buyers[i].round_down(bids[i]);
    b[i] = k ? Bid{true, rule.buyers[i].virtuals[*k]} : Bid{false, 0.0};
    if (b[i].eligible && b[i].phi >= 0.0 && (!winner || b[i].phi > b[*winner].phi)) {
      winner = i;
    }
  }
  Outcome out;
  if (!winner) return out;
  const std::size_t w = *winner;
  const BuyerRule& br = rule.buyers[w];
  // Threshold: beat lower indices strictly, match higher indices.
  for (std::size_t k = 0; k < br.values.size(); ++k) {
    const double phi = br.virtuals[k];
    bool wins = phi >= 0.0;
    for (std::size_t j = 0; wins && j < n; ++j) {
      if (j == w || !b[j].eligible) continue;
      wins = j < w ? phi > b[j].phi : phi >= b[j].phi;
    }
    if (wins) {
      out.winner = w;
      out.payment = br.values[k];
      return out;
    }
  }
  throw std::logic_error("winner has no clearing support value");
}

RevenueEstimate expected_revenue(const AuctionRule& rule, const ProductPrior& prior, ExactMode) {
  if (rule.size() != prior.size()) throw std::invalid_argument("rule and prior sizes differ");
  double total = 0.0;
  enumerate_profiles(prior, [&](std::span<const double> bids, double p) {
    total += p * run_auction(rule, bids).payment;
  });
  return {total, std::nullopt};
}

RevenueEstimate expected_revenue(const AuctionRule& rule, const ProductPrior& prior,
                                 MonteCarloMode mode) {
  if (rule.size() != prior.size()) throw std::invalid_argument("rule and prior sizes differ");
  if (mode.trials == 0) throw std::invalid_argument("trials must be positive");
  const std::size_t n = prior.size();
  std::vector<double> bids(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < mode.trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = counter_uniform(mode.seed, i, t);
      bids[i] = prior.buyers[i].value_at(1.0 - u);
    }
    const double pay = run_auction(rule, bids).payment;
    sum += pay;
    sum_sq += pay * pay;
  }
  const double m = static_cast<double>(mode.trials);
  const double mean = sum / m;
  const double var = mode.trials > 1 ? std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0)) : 0.0;
  return {mean, std::sqrt(var / m)};
}

double opt_revenue(const ProductPrior& prior) {
  return expected_revenue(build_auction(prior), prior).revenue;
}

double expected_virtual_surplus(const AuctionRule& rule, const ProductPrior& prior) {
  if (rule.size() != prior.size()) throw std::invalid_argument("rule and prior sizes differ");
  double total = 0.0;
  enumerate_profiles(prior, [&](std::span<const double> bids, double p) {
    const Outcome o = run_auction(rule, bids);
    if (!o.winner) return;
    const BuyerRule& br = rule.buyers[*o.winner];
    total += p * br.virtuals[*br.round_down(bids[*o.winner])];
  });
  return total;
}

}  // namespace tsa
