// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsa/oracle.hpp"
#include "tsa/quantile_dist.hpp"

namespace tsa {

struct ExperimentConfig {
  std::string suite = "learn";
  Family family = Family::Unit01;
  double eps = 0.1;
  double delta = 0.0;
  std::size_t n = 1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  double c_log = 1.0;
  double L = 0.0;         // 0 selects the default log factor
  double c_bound = 3.0;   // pinpoint count bound multiplier
  double N = 0.0;         // 0 lets choose_params pick N
  std::size_t support = 10;
  double H = 16.0;
  std::size_t k = 10;     // query budget for the lower-bound suites
  OracleMode mode = OracleMode::ExactDistribution;
  std::size_t holder_m = 1000;
  unsigned threads = 0;   // 0 uses the hardware concurrency

  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;
  double opt = 0.0;
  double learned = 0.0;
  double ratio = 0.0;
  double gap = 0.0;
  std::uint64_t budget = 0;
  bool pass = false;
  double ms = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  double pass_rate = 0.0;
  double mean_ratio = 0.0;
  double mean_gap = 0.0;
  double mean_budget = 0.0;
  std::uint64_t max_budget = 0;
};

/// Suites: sandwich, learn, single-grid, single-concave, monotonicity,
/// lowerbound-unit-hill, lowerbound-geo-hill. Trials run concurrently; each
/// draws its randomness from (seed, trial index) only.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Hill-probing strategy against the unit hill family with k exact
/// queries: probe the peaks of sites 0..k-1, take a visible hill, otherwise
/// bet on site k.
double hill_probe_price(Oracle& oracle, double eps, std::size_t k);
/// Same strategy for the geometric hill family (sites 1..k probed, bet on k+1).
double geo_hill_probe_price(Oracle& oracle, double eps, double H, std::size_t k);

/// D' with each atom value x replaced by some g(x) <= x, so D dominates D'.
ProductPrior random_dominated(const ProductPrior& d, std::uint64_t seed);

void write_csv(const ExperimentReport& report, std::ostream& out, bool with_time = true);
nlohmann::json report_json(const ExperimentReport& report, bool with_records = true);
/// Writes CSV when the path ends in .csv, JSON otherwise.
void write_report(const ExperimentReport& report, const std::string& path);

}  // namespace tsa
