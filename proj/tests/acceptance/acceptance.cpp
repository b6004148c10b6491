// SPDX-License-Identifier: Apache-2.0
// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsa/analysis.hpp"
#include "tsa/experiment.hpp"
#include "tsa/generators.hpp"
#include "tsa/learners.hpp"
#include "tsa/myerson.hpp"

using namespace tsa;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool pass = v.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s %-3s %s | %s | %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", id, title,
              v.detail.c_str(), secs, limit_s, in_time ? "" : " over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ShadeParams shade(double N, std::size_t n) {
  ShadeParams p;
  p.N = N;
  p.n = n;
  p.L = default_L(N, n);
  return p;
}

ProductPrior single(QuantileDistribution d) {
  ProductPrior p;
  p.buyers.push_back(std::move(d));
  return p;
}

Verdict exact_sandwich() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 4;
    const std::size_t support = 2 + (seed * 7) % 19;
    const Family fam = seed % 2 ? Family::OneToH : Family::Unit01;
    const ProductPrior prior = gen_family(fam, {n, support, 16}, 1000 + seed);
    bool all = true;
    for (double N : {4.0, 16.0, 64.0}) {
      Oracle oracle(prior, OracleConfig{});
      const LearnResult r = learn_pinpoint(oracle, shade(N, n));
      for (std::size_t i = 0; i < n; ++i) {
        const SandwichReport s = verify_sandwich(prior.buyers[i], r.learned.buyers[i], shade(N, n));
        all = all && s.dominates_upper && s.dominates_lower;
      }
    }
    ok += all;
  }
  return {ok == 200, fmt("%.0f/200 priors hold for every N in {4,16,64}", ok)};
}

Verdict pinpoint_budget() {
  double worst = 0.0;
  bool ok = true;
  for (int N = 4; N <= 256; ++N) {
    for (std::size_t n = 1; n <= 64; ++n) {
      const double k = static_cast<double>(pinpoints(shade(N, n)).size() - 1);
      const double bound = 3.0 * N * std::log(static_cast<double>(N) * N * n);
      worst = std::max(worst, k / bound);
      ok = ok && k <= bound;
    }
  }
  return {ok, fmt("max k / (3 N ln(N^2 n)) = %.4f", worst)};
}

Verdict monotonicity() {
  ExperimentConfig c;
  c.suite = "monotonicity";
  c.family = Family::Unit01;
  c.n = 3;
  c.support = 8;
  c.trials = 100;
  c.seed = 3;
  const ExperimentReport r = run_experiment(c);
  const double passed = r.pass_rate * 100.0;
  return {r.pass_rate == 1.0, fmt("%.0f/100 pairs monotone (strong and weak)", passed)};
}

Verdict thresholds() {
  int ok = 0;
  double worst_sum = 0.0;
  double worst_ratio = 2.0;
  for (double eps : {0.1, 0.25}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const ProductPrior prior = gen_family(Family::Regular, {1 + seed % 4, 8, 0}, 4000 + seed);
      const ThetaVector t = theta_thresholds(prior, eps);
      const double cap = std::log(1.0 / eps) + 1.0;
      worst_sum = std::max(worst_sum, t.sum / cap);
      worst_ratio = std::min(worst_ratio, t.achieved_ratio);
      ok += t.sum <= cap + 1e-12 && t.opt_truncated >= (1.0 - eps) * t.opt - 1e-12;
    }
  }
  return {ok == 100, fmt("%.0f/100 (50 per eps); max sum/cap %.3f; min opt ratio %.4f", ok, worst_sum,
                         worst_ratio)};
}

Verdict end_to_end_queries() {
  const ChosenParams chosen = choose_params(Family::Unit01, 0.1, 3, 0.0);
  const double N = chosen.params.N;
  const double bound = 3.0 * N * std::log(N * N * 3.0);
  int ok = 0;
  double worst_gap = -1.0;
  std::size_t max_queries = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ProductPrior prior = gen_family(Family::Unit01, {3, 10, 0}, 5000 + seed);
    Oracle oracle(prior, OracleConfig{});
    const LearnResult r = learn(oracle, chosen);
    const double gap = opt_revenue(prior) - expected_revenue(r.rule, prior).revenue;
    worst_gap = std::max(worst_gap, gap);
    bool within = gap <= 0.1 + 1e-9;
    for (auto q : r.budget.queries) {
      max_queries = std::max<std::size_t>(max_queries, q);
      within = within && static_cast<double>(q) <= bound;
    }
    ok += within;
  }
  return {ok == 100, fmt("%.0f/100; N=%.0f; worst gap %.4f", ok, N, worst_gap) +
                         fmt("; max queries/buyer %.0f <= %.0f", static_cast<double>(max_queries), bound)};
}

Verdict end_to_end_samples() {
  ExperimentConfig c;
  c.suite = "learn";
  c.family = Family::Unit01;
  c.eps = 0.15;
  c.delta = 0.25;
  c.n = 4;
  c.trials = 100;
  c.seed = 6;
  const ChosenParams chosen = choose_params(c.family, c.eps, c.n, c.delta);
  if (chosen.learner != LearnerKind::Interval) return {false, "chooser did not select the interval learner"};
  const ExperimentReport r = run_experiment(c);
  double worst = 0.0;
  for (const TrialRecord& t : r.records) worst = std::max(worst, t.gap);
  const double passed = std::round(r.pass_rate * 100.0);
  return {passed >= 90, fmt("%.0f/100 with gap <= 0.15; N=%.0f; mean gap %.4f", passed, chosen.params.N, r.mean_gap) +
                            fmt("; worst gap %.4f; samples/trial %.0f", worst, r.mean_budget)};
}

Verdict concave_search() {
  Oracle oracle(single(QuantileDistribution::curve({{0, 1}, {1, 0}})), OracleConfig{});
  const double eps = 0.05;
  const SingleResult s = single_concave_search(oracle, Family::Regular, eps, 1);
  const double revenue = s.reserve * (1.0 - s.reserve);
  const double cap = 5.0 * std::ceil(std::log2((1.0 - 2.0 * eps) / eps)) + 5.0;
  const auto probes = static_cast<double>(oracle.ledger().total_queries());
  return {revenue >= 0.95 * 0.25 && probes <= cap,
          fmt("reserve %.4f revenue %.5f; probes %.0f", s.reserve, revenue, probes) + fmt(" <= %.0f", cap)};
}

Verdict unit_grid() {
  ExperimentConfig c;
  c.suite = "single-grid";
  c.eps = 0.2;
  c.trials = 100;
  c.support = 12;
  c.seed = 8;
  const ExperimentReport r = run_experiment(c);
  double worst = 0.0;
  bool queries_ok = true;
  for (const TrialRecord& t : r.records) {
    worst = std::max(worst, t.gap);
    queries_ok = queries_ok && t.budget == 20;
  }
  const double passed = std::round(r.pass_rate * 100.0);
  return {passed == 100 && queries_ok, fmt("%.0f/100 with gap <= 0.1; worst gap %.4f; ", passed, worst) +
                                           (queries_ok ? "20 queries each" : "query count off")};
}

Verdict kl_scaling() {
  // Fixtures: a uniform grid plus random [0,1] priors whose top atom and zero
  // atom both carry at least 9 / (N^2 n) at N = 32 after truncation.
  std::vector<QuantileDistribution> bases;
  {
    std::vector<Atom> atoms;
    for (int k = 0; k < 10; ++k) atoms.push_back({k / 9.0, 0.1});
    bases.push_back(QuantileDistribution::discrete(atoms));
  }
  for (std::uint64_t seed = 0; bases.size() < 4; ++seed) {
    auto d = gen_family(Family::Unit01, {1, 8, 0}, 9000 + seed).buyers[0];
    std::vector<Atom> atoms = d.atoms();
    // Give the fixture a zero atom so truncation and shading share support.
    for (Atom& a : atoms) a.mass *= 0.8;
    atoms.push_back({0.0, 0.2});
    d = QuantileDistribution::discrete(atoms);
    if (d.atoms().front().mass >= 9.0 / (32.0 * 32.0) && d.cumulative()[0] <= 0.1) bases.push_back(d);
  }
  double min_ratio = 1e300;
  bool ok = true;
  for (std::size_t n : {1U, 2U}) {
    for (double theta : {0.1, 0.5}) {
      for (const auto& base : bases) {
        const auto dt = truncate_tail(base, theta);
        const double floor_mass = 9.0 / (32.0 * 32.0 * static_cast<double>(n));
        if (dt.atoms().front().mass < floor_mass || dt.atoms().back().mass < floor_mass) {
          return {false, "fixture misses the endpoint-mass precondition"};
        }
        double prev = dskl(dt, shade_df_dist(dt, shade(32, n)));
        for (double N : {64.0, 128.0}) {
          const double cur = dskl(dt, shade_df_dist(dt, shade(N, n)));
          const double ratio = prev / cur;
          min_ratio = std::min(min_ratio, ratio);
          ok = ok && std::isfinite(prev) && ratio >= 3.0;
          prev = cur;
        }
      }
    }
  }
  return {ok, fmt("min reduction per doubling %.3fx over %.0f fixture/theta/n cases", min_ratio,
                  static_cast<double>(bases.size() * 4))};
}

Verdict hill_demo(double eps) {
  ExperimentConfig c;
  c.suite = "lowerbound-unit-hill";
  c.eps = eps;
  c.k = 10;
  c.trials = 2000;
  c.seed = 10;
  const ExperimentReport r = run_experiment(c);
  const double failure = 1.0 - r.pass_rate;
  const double target = 1.0 - 8.0 * eps * 11.0 - 0.05;
  return {failure >= target, fmt("failure %.4f >= %.4f; sites %.0f", failure, target,
                                 static_cast<double>(unit_hill_sites(eps)))};
}

Verdict conditional_law() {
  const std::vector<QuantileDistribution> fixtures{
      QuantileDistribution::discrete({{3, 0.2}, {2, 0.3}, {1, 0.5}}),
      QuantileDistribution::discrete({{0.9, 0.05}, {0.7, 0.25}, {0.4, 0.4}, {0.1, 0.3}}),
      QuantileDistribution::discrete({{16, 0.1}, {8, 0.15}, {4, 0.25}, {2, 0.2}, {1, 0.3}}),
  };
  const std::vector<std::pair<double, double>> intervals{{0.0, 0.35}, {0.1, 0.6}, {0.45, 1.0}};
  const int m = 40000;
  int bands = 0;
  int inside = 0;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto& d = fixtures[f];
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      const auto [a, b] = intervals[k];
      OracleConfig oc;
      oc.seed = 11 * 100 + f * 10 + k;
      Oracle oracle(single(d), oc);
      std::map<double, int> counts;
      for (int t = 0; t < m; ++t) ++counts[oracle.targeted_sample(0, a, b)];
      // Conditional mass of each atom: overlap of its quantile cell with [a, b].
      double lo = 0.0;
      for (const Atom& atom : d.atoms()) {
        const double hi = lo + atom.mass;
        const double p = std::max(0.0, std::min(hi, b) - std::max(lo, a)) / (b - a);
        lo = hi;
        const double freq = counts[atom.value] / static_cast<double>(m);
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / m);
        ++bands;
        inside += std::abs(freq - p) <= 4.0 * se;
      }
    }
  }
  return {inside == bands, fmt("%.0f/%.0f atom frequencies inside the 4-SE band", inside, bands)};
}

}  // namespace

int main() {
  criterion("1", "exact sandwich under exact queries", 10, exact_sandwich);
  criterion("2", "pinpoint count bound", 5, pinpoint_budget);
  criterion("3", "revenue monotonicity", 30, monotonicity);
  criterion("4", "truncation thresholds", 60, thresholds);
  criterion("5", "end-to-end learning from targeted queries", 120, end_to_end_queries);
  criterion("6", "end-to-end learning from targeted samples", 300, end_to_end_samples);
  criterion("7", "single-buyer concave search", 1, concave_search);
  criterion("8", "unit grid guarantee", 5, unit_grid);
  criterion("9", "divergence scaling in N", 10, kl_scaling);
  criterion("10", "unit hill lower bound, eps = 0.02", 30, [] { return hill_demo(0.02); });
  criterion("10b", "unit hill lower bound, eps = 0.002", 30, [] { return hill_demo(0.002); });
  criterion("11", "targeted sample conditional law", 10, conditional_law);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
