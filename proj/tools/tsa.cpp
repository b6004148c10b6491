// SPDX-License-Identifier: Apache-2.0
// Command-line front end: gen, learn, analyze, bench, lowerbound.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "tsa/analysis.hpp"
#include "tsa/experiment.hpp"
#include "tsa/generators.hpp"
#include "tsa/learners.hpp"
#include "tsa/myerson.hpp"
#include "tsa/prior_io.hpp"

using namespace tsa;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    save_json(out, j);
  }
}

// Exact when enumeration is small enough, Monte Carlo otherwise.
json revenue_json(const AuctionRule& rule, const ProductPrior& prior, std::uint64_t seed) {
  double profiles = 1.0;
  for (const auto& b : prior.buyers) profiles *= static_cast<double>(b.atoms().size());
  const RevenueEstimate est = profiles <= kMaxProfiles ? expected_revenue(rule, prior)
                                                       : expected_revenue(rule, prior, MonteCarloMode{200000, seed});
  json j{{"revenue", est.revenue}, {"method", est.stderr_ ? "monte_carlo" : "exact"}};
  if (est.stderr_) j["stderr"] = *est.stderr_;
  return j;
}

json rule_json(const AuctionRule& rule) {
  json buyers = json::array();
  for (const BuyerRule& b : rule.buyers) {
    buyers.push_back(json{{"values", b.values}, {"ironed_virtuals", b.virtuals}});
  }
  json j{{"buyers", buyers}};
  if (rule.buyers.size() == 1) {
    if (auto p = rule.posted_price()) j["posted_price"] = *p;
  }
  return j;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : "-inf"); }

json budget_json(const BudgetLedger& l) {
  return {{"samples", l.samples},
          {"queries", l.queries},
          {"total_samples", l.total_samples()},
          {"total_queries", l.total_queries()}};
}

Family parse_family(const std::string& s) {
  const Family f = family_from_string(s);
  if (f == Family::Unknown) throw CLI::ValidationError("--family", "unknown family '" + s + "'");
  return f;
}

OracleMode parse_mode(const std::string& s) {
  if (s == "exact") return OracleMode::ExactDistribution;
  if (s == "holder") return OracleMode::DataHolder;
  throw CLI::ValidationError("--mode", "expected exact or holder");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Targeted-sample auction learning toolkit"};
  app.require_subcommand(1);

  std::string family = "unit01";
  double eps = 0.1;
  double delta = 0.0;
  std::size_t n = 1;
  std::uint64_t seed = 1;
  std::string out;
  double c_log = 1.0;
  double L = 0.0;
  double H = 16.0;
  std::size_t support = 10;
  std::string prior_path;
  std::string mode = "exact";
  std::size_t holder_m = 1000;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--family", family, "regular | mhr | unit01 | one_to_h");
    sub->add_option("--eps", eps, "accuracy target");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out, "output path (stdout when omitted)");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a random product prior");
  common(gen);
  gen->add_option("--n", n, "number of buyers");
  gen->add_option("--support", support, "support size per buyer");
  gen->add_option("--H", H, "upper end for one_to_h");

  CLI::App* learn_cmd = app.add_subcommand("learn", "learn an auction from a prior file");
  common(learn_cmd);
  learn_cmd->add_option("--prior", prior_path, "prior JSON")->required();
  learn_cmd->add_option("--delta", delta, "targeting power");
  learn_cmd->add_option("--n", n, "number of buyers (checked against the prior)");
  learn_cmd->add_option("--c-log", c_log, "log-factor multiplier");
  learn_cmd->add_option("--L", L, "log factor L (0 picks the default)");
  learn_cmd->add_option("--H", H, "upper end for one_to_h");
  learn_cmd->add_option("--mode", mode, "exact | holder");
  learn_cmd->add_option("--holder-m", holder_m, "dataset size per buyer in holder mode");

  std::string other_path;
  double N_shade = 0.0;
  CLI::App* analyze = app.add_subcommand("analyze", "divergence, thresholds and sandwich reports");
  common(analyze);
  analyze->add_option("--prior", prior_path, "prior JSON")->required();
  analyze->add_option("--other", other_path, "second prior for divergence and revenue gap");
  analyze->add_option("--N", N_shade, "shade the prior with this N and report the divergence");
  double alpha = 0.05;
  analyze->add_option("--alpha", alpha, "revenue gap tolerance for --other");
  double K = 1.0;
  analyze->add_option("--K", K, "sample count K for the divergence threshold");

  ExperimentConfig cfg;
  std::string bench_mode = "exact";
  CLI::App* bench = app.add_subcommand("bench", "run an experiment suite");
  common(bench);
  bench->add_option("--suite", cfg.suite,
                    "sandwich | learn | single-grid | single-concave | monotonicity | "
                    "lowerbound-unit-hill | lowerbound-geo-hill");
  bench->add_option("--delta", cfg.delta, "targeting power");
  bench->add_option("--n", cfg.n, "number of buyers");
  bench->add_option("--trials", cfg.trials, "trial count");
  bench->add_option("--c-log", cfg.c_log, "log-factor multiplier");
  bench->add_option("--L", cfg.L, "log factor L (0 picks the default)");
  bench->add_option("--c-bound", cfg.c_bound, "pinpoint count bound multiplier");
  bench->add_option("--N", cfg.N, "override N");
  bench->add_option("--support", cfg.support, "support size per buyer");
  bench->add_option("--H", cfg.H, "upper end for one_to_h and geo hills");
  bench->add_option("--k", cfg.k, "query budget for lower-bound suites");
  bench->add_option("--mode", bench_mode, "exact | holder");
  bench->add_option("--holder-m", cfg.holder_m, "dataset size per buyer in holder mode");
  bench->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

  std::string lb_family = "unit-hill";
  std::size_t site = 0;
  std::uint64_t index = 0;
  std::size_t grid = 0;
  CLI::App* lowerbound = app.add_subcommand("lowerbound", "emit a lower-bound instance");
  lowerbound->add_option("--family", lb_family, "top-triangle | unit-hill | geo-hill");
  lowerbound->add_option("--eps", eps, "hill width parameter");
  lowerbound->add_option("--H", H, "upper end for geo-hill");
  lowerbound->add_option("--s", site, "hill site, or split rounds for top-triangle");
  lowerbound->add_option("--index", index, "branch bits for top-triangle");
  lowerbound->add_option("--grid", grid, "discretize to this many quantile cells (0 keeps the curve)");
  lowerbound->add_option("--out", out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ProductPrior p = gen_family(parse_family(family), {n, support, H}, seed);
      emit(to_json(p), out);
    } else if (learn_cmd->parsed()) {
      const ProductPrior prior = load_prior(prior_path);
      if (learn_cmd->count("--n") && n != prior.size()) {
        throw std::invalid_argument("--n does not match the prior's buyer count");
      }
      const ChosenParams chosen = choose_params(parse_family(family), eps, prior.size(), delta, H, c_log, L);
      OracleConfig oc;
      oc.delta = delta;
      oc.seed = seed;
      oc.mode = parse_mode(mode);
      oc.holder_m = holder_m;
      Oracle oracle(prior, oc);
      const LearnResult r = learn(oracle, chosen);
      json j{{"learner", r.learner},
             {"learned_prior", to_json(r.learned)},
             {"rule", rule_json(r.rule)},
             {"budget", budget_json(r.budget)},
             {"params",
              {{"N", r.params.N},
               {"n", r.params.n},
               {"L", r.params.L},
               {"delta", r.params.delta},
               {"c_log", r.params.c_log},
               {"eps", eps},
               {"family", family}}}};
      if (prior.all_discrete()) {
        j["learned_revenue"] = revenue_json(r.rule, prior, seed);
        j["opt_revenue"] = revenue_json(build_auction(prior), prior, seed);
      }
      emit(j, out);
    } else if (analyze->parsed()) {
      const ProductPrior prior = load_prior(prior_path);
      json j{{"buyers", prior.size()}};
      if (prior.all_discrete()) {
        j["opt_revenue"] = opt_revenue(prior);
        const ThetaVector t = theta_thresholds(prior, eps);
        j["thresholds"] = {{"eps", eps},
                           {"thetas", t.thetas},
                           {"phi_star", number(t.phi_star)},
                           {"sum", t.sum},
                           {"sum_cap", std::log(1.0 / eps) + 1.0},
                           {"achieved_ratio", t.achieved_ratio}};
      }
      if (N_shade > 0.0) {
        ShadeParams p;
        p.N = N_shade;
        p.n = prior.size();
        p.L = default_L(N_shade, prior.size());
        ProductPrior shaded = prior;
        for (auto& b : shaded.buyers) b = shade_df_dist(b, p);
        j["shaded"] = {{"N", N_shade}, {"dskl", number(dskl(prior, shaded))}};
      }
      if (!other_path.empty()) {
        const ProductPrior other = load_prior(other_path);
        const KlGapReport r = kl_revenue_gap(prior, other, K, alpha);
        j["comparison"] = {{"dskl", number(r.dskl)},     {"threshold", r.threshold},
                           {"opt_gap", r.opt_gap}, {"alpha", r.alpha},
                           {"below_threshold", r.below_threshold}, {"gap_within_2alpha", r.gap_within},
                           {"dominates", dominates(prior, other)}};
      }
      emit(j, out);
    } else if (bench->parsed()) {
      cfg.family = parse_family(family);
      cfg.eps = eps;
      cfg.seed = seed;
      cfg.out = out;
      cfg.mode = parse_mode(bench_mode);
      const ExperimentReport r = run_experiment(cfg);
      if (out.empty()) {
        std::cout << report_json(r, false).dump(2) << "\n";
      } else {
        write_report(r, out);
        std::fprintf(stderr, "pass rate %.4f over %zu trials -> %s\n", r.pass_rate, r.records.size(),
                     out.c_str());
      }
    } else if (lowerbound->parsed()) {
      QuantileDistribution d = QuantileDistribution::point_mass(0);
      if (lb_family == "top-triangle") {
        d = gen_top_triangle(static_cast<unsigned>(site), index);
      } else if (lb_family == "unit-hill") {
        d = gen_unit_hill(eps, site);
      } else if (lb_family == "geo-hill") {
        d = gen_geo_hill(eps, H, site);
      } else {
        throw std::invalid_argument("unknown lower-bound family '" + lb_family + "'");
      }
      if (grid > 0) d = discretize(d, grid);
      emit(to_json(d), out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
