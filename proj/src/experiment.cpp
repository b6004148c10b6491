// SPDX-License-Identifier: Apache-2.0
#include "tsa/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tsa/analysis.hpp"
#include "tsa/generators.hpp"
#include "tsa/learners.hpp"
#include "tsa/myerson.hpp"
#include "tsa/prior_io.hpp"
#include "tsa/rng.hpp"

namespace tsa {

namespace {

using nlohmann::json;

constexpr double kRevTol = 1e-9;

bool additive(Family f) { return f == Family::Unit01; }

bool meets_target(Family f, double learned, double opt, double eps) {
  return additive(f) ? learned >= opt - eps - kRevTol : learned >= (1.0 - eps) * opt - kRevTol;
}

void fill_ratio(TrialRecord& r) {
  r.gap = r.opt - r.learned;
  r.ratio = r.opt > 0.0 ? r.learned / r.opt : 1.0;
}

std::uint64_t spent(const BudgetLedger& l) { return l.total_samples() + l.total_queries(); }

OracleConfig oracle_config(const ExperimentConfig& c, std::uint64_t seed, double delta) {
  OracleConfig oc;
  oc.delta = delta;
  oc.mode = c.mode;
  oc.holder_m = c.holder_m;
  oc.seed = seed;
  return oc;
}

ChosenParams params_for(const ExperimentConfig& c, std::size_t n) {
  ChosenParams chosen = choose_params(c.family, c.eps, n, c.delta, c.H, c.c_log, c.L);
  if (c.N > 0.0) {
    chosen.params.N = c.N;
    if (!(c.L > 0.0)) chosen.params.L = default_L(c.N, n);
  }
  return chosen;
}

TrialRecord trial_sandwich(const ExperimentConfig& c, std::uint64_t seed) {
  const ProductPrior prior = gen_family(c.family, {c.n, c.support, c.H}, seed);
  ShadeParams p = params_for(c, c.n).params;
  p.delta = 0.0;
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), 0.0));
  const LearnResult res = learn_pinpoint(oracle, p);
  TrialRecord r;
  r.pass = true;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const SandwichReport s = verify_sandwich(prior.buyers[i], res.learned.buyers[i], p);
    r.pass = r.pass && s.dominates_upper && s.dominates_lower;
  }
  r.opt = opt_revenue(prior);
  r.learned = expected_revenue(res.rule, prior).revenue;
  r.budget = spent(res.budget);
  return r;
}

TrialRecord trial_learn(const ExperimentConfig& c, std::uint64_t seed) {
  const ProductPrior prior = gen_family(c.family, {c.n, c.support, c.H}, seed);
  const ChosenParams chosen = params_for(c, c.n);
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), c.delta));
  const LearnResult res = learn(oracle, chosen);
  TrialRecord r;
  r.opt = opt_revenue(prior);
  r.learned = expected_revenue(res.rule, prior).revenue;
  r.budget = spent(res.budget);
  r.pass = meets_target(c.family, r.learned, r.opt, c.eps);
  return r;
}

TrialRecord trial_single_grid(const ExperimentConfig& c, std::uint64_t seed) {
  const ProductPrior prior = gen_family(Family::Unit01, {1, c.support, c.H}, seed);
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), c.delta));
  const SingleResult s = single_grid_unit(oracle, c.eps);
  const double d = c.eps / 4.0;
  const double e = c.delta == 0.0 ? 0.0 : c.eps / 8.0;
  TrialRecord r;
  r.opt = best_posted_price(prior.buyers[0]).revenue;
  r.learned = posted_price_revenue(prior.buyers[0], s.reserve);
  r.budget = spent(s.budget);
  r.pass = r.learned >= r.opt - 2.0 * d - 3.0 * e - kRevTol;
  return r;
}

TrialRecord trial_single_concave(const ExperimentConfig& c, std::uint64_t seed) {
  const Family fam = c.family == Family::MHR ? Family::MHR : Family::Regular;
  const ProductPrior prior = gen_family(fam, {1, c.support, c.H}, seed);
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), c.delta));
  const ChosenParams chosen = choose_params(fam, c.eps, 1, c.delta, c.H, c.c_log, c.L);
  const SingleResult s =
      single_concave_search(oracle, fam, c.eps, static_cast<std::size_t>(chosen.params.N));
  TrialRecord r;
  r.opt = best_posted_price(prior.buyers[0]).revenue;
  r.learned = posted_price_revenue(prior.buyers[0], s.reserve);
  r.budget = spent(s.budget);
  r.pass = meets_target(fam, r.learned, r.opt, c.eps);
  return r;
}

TrialRecord trial_monotonicity(const ExperimentConfig& c, std::uint64_t seed) {
  const ProductPrior d = gen_family(c.family, {c.n, c.support, c.H}, seed);
  const ProductPrior dp = random_dominated(d, derive_seed(seed, 2));
  const AuctionRule rule_p = build_auction(dp);
  const double on_d = expected_revenue(rule_p, d).revenue;
  const double on_dp = expected_revenue(rule_p, dp).revenue;
  TrialRecord r;
  r.opt = opt_revenue(d);
  r.learned = on_d;
  r.pass = on_d >= on_dp - kRevTol && r.opt >= opt_revenue(dp) - kRevTol;
  return r;
}

TrialRecord trial_unit_hill(const ExperimentConfig& c, std::uint64_t seed) {
  const std::size_t sites = unit_hill_sites(c.eps);
  const auto s = static_cast<std::size_t>(std::floor(counter_uniform(seed, 0, 0) * static_cast<double>(sites)));
  ProductPrior prior;
  prior.buyers.push_back(gen_unit_hill(c.eps, std::min(s, sites - 1)));
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), 0.0));
  const double price = hill_probe_price(oracle, c.eps, c.k);
  TrialRecord r;
  r.opt = best_posted_price(prior.buyers[0]).revenue;
  r.learned = posted_price_revenue(prior.buyers[0], price);
  r.budget = spent(oracle.ledger());
  r.pass = r.learned >= r.opt - c.eps - kRevTol;
  return r;
}

TrialRecord trial_geo_hill(const ExperimentConfig& c, std::uint64_t seed) {
  const std::size_t sites = geo_hill_sites(c.eps, c.H);
  const auto s = 1 + static_cast<std::size_t>(std::floor(counter_uniform(seed, 0, 0) * static_cast<double>(sites)));
  ProductPrior prior;
  prior.buyers.push_back(gen_geo_hill(c.eps, c.H, std::min(s, sites)));
  Oracle oracle(prior, oracle_config(c, derive_seed(seed, 1), 0.0));
  const double price = geo_hill_probe_price(oracle, c.eps, c.H, c.k);
  TrialRecord r;
  r.opt = best_posted_price(prior.buyers[0]).revenue;
  r.learned = posted_price_revenue(prior.buyers[0], price);
  r.budget = spent(oracle.ledger());
  r.pass = r.learned >= (1.0 - c.eps) * r.opt - kRevTol;
  return r;
}

using TrialFn = TrialRecord (*)(const ExperimentConfig&, std::uint64_t);

TrialFn suite_fn(const std::string& suite) {
  if (suite == "sandwich") return trial_sandwich;
  if (suite == "learn") return trial_learn;
  if (suite == "single-grid") return trial_single_grid;
  if (suite == "single-concave") return trial_single_concave;
  if (suite == "monotonicity") return trial_monotonicity;
  if (suite == "lowerbound-unit-hill") return trial_unit_hill;
  if (suite == "lowerbound-geo-hill") return trial_geo_hill;
  throw std::invalid_argument("unknown suite: " + suite);
}

}  // namespace

void ExperimentConfig::validate() const {
  suite_fn(suite);
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
}

double hill_probe_price(Oracle& oracle, double eps, std::size_t k) {
  const std::size_t sites = unit_hill_sites(eps);
  const std::size_t probes = std::min(k, sites);
  for (std::size_t s = 0; s < probes; ++s) {
    const double q = unit_hill_peak_quantile(eps, s);
    const double v = oracle.targeted_query(0, q);
    if (q * v > 0.5 + eps) return v;
  }
  const std::size_t guess = std::min(probes, sites - 1);
  const double q = unit_hill_peak_quantile(eps, guess);
  const double h0 = 0.5 + 4.0 * static_cast<double>(guess) * eps;
  return 0.5 * (q + 1.0 - h0) / q;
}

double geo_hill_probe_price(Oracle& oracle, double eps, double H, std::size_t k) {
  const std::size_t sites = geo_hill_sites(eps, H);
  const std::size_t probes = std::min(k, sites);
  for (std::size_t s = 1; s <= probes; ++s) {
    const double q = geo_hill_peak_quantile(eps, H, s);
    const double v = oracle.targeted_query(0, q);
    if (q * v > 1.0 + eps) return v;
  }
  const std::size_t guess = std::min(probes + 1, sites);
  return H * std::pow(1.0 + 2.0 * eps, 1.0 - static_cast<double>(guess));
}

ProductPrior random_dominated(const ProductPrior& d, std::uint64_t seed) {
  ProductPrior out;
  out.family = Family::Unknown;
  out.H = d.H;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CounterStream rng(seed, i);
    std::vector<Atom> atoms;
    for (const Atom& a : d.buyers[i].atoms()) {
      const double u = rng.uniform();
      const double shrink = u < 0.5 ? 1.0 : rng.uniform();
      atoms.push_back({a.value * shrink, a.mass});
    }
    double total = 0.0;
    for (const Atom& a : atoms) total += a.mass;
    atoms.back().mass += 1.0 - total;
    out.buyers.push_back(QuantileDistribution::discrete(std::move(atoms)));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TrialFn fn = suite_fn(config.suite);
  ExperimentReport report;
  report.config = config;
  report.records.resize(config.trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= config.trials) return;
      try {
        const auto start = std::chrono::steady_clock::now();
        TrialRecord r = fn(config, derive_seed(config.seed, t));
        r.trial = t;
        fill_ratio(r);
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report.records[t] = r;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(config.trials);
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.trials));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  const double m = static_cast<double>(report.records.size());
  std::size_t passes = 0;
  for (const TrialRecord& r : report.records) {
    passes += r.pass ? 1 : 0;
    report.mean_ratio += r.ratio / m;
    report.mean_gap += r.gap / m;
    report.mean_budget += static_cast<double>(r.budget) / m;
    report.max_budget = std::max(report.max_budget, r.budget);
  }
  report.pass_rate = static_cast<double>(passes) / m;
  return report;
}

void write_csv(const ExperimentReport& report, std::ostream& out, bool with_time) {
  out << "trial,opt,learned,ratio,gap,budget,pass,ms\n";
  out.precision(17);
  for (const TrialRecord& r : report.records) {
    out << r.trial << ',' << r.opt << ',' << r.learned << ',' << r.ratio << ',' << r.gap << ','
        << r.budget << ',' << (r.pass ? 1 : 0) << ',';
    if (with_time) out << r.ms;
    out << '\n';
  }
}

json report_json(const ExperimentReport& report, bool with_records) {
  const ExperimentConfig& c = report.config;
  json j;
  j["config"] = {{"suite", c.suite}, {"family", to_string(c.family)}, {"eps", c.eps},
                 {"delta", c.delta}, {"n", c.n}, {"trials", c.trials}, {"seed", c.seed},
                 {"c_log", c.c_log}, {"L", c.L}, {"N", c.N}, {"support", c.support},
                 {"H", c.H}, {"k", c.k}};
  j["summary"] = {{"pass_rate", report.pass_rate}, {"mean_ratio", report.mean_ratio},
                  {"mean_gap", report.mean_gap}, {"mean_budget", report.mean_budget},
                  {"max_budget", report.max_budget}};
  if (with_records) {
    json rows = json::array();
    for (const TrialRecord& r : report.records) {
      rows.push_back({{"trial", r.trial}, {"opt", r.opt}, {"learned", r.learned},
                      {"ratio", r.ratio}, {"gap", r.gap}, {"budget", r.budget},
                      {"pass", r.pass}, {"ms", r.ms}});
    }
    j["records"] = std::move(rows);
  }
  return j;
}

void write_report(const ExperimentReport& report, const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    write_csv(report, out);
    if (!out) throw std::runtime_error("write failed: " + path);
    return;
  }
  save_json(path, report_json(report));
}

}  // namespace tsa
