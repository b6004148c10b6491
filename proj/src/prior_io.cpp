// SPDX-License-Identifier: Apache-2.0
#include "tsa/prior_io.hpp"

#include <fstream>
#include <stdexcept>

namespace tsa {

using nlohmann::json;

json to_json(const QuantileDistribution& d) {
  json j;
  if (d.is_discrete()) {
    j["kind"] = "discrete";
    json support = json::array();
    for (const Atom& a : d.atoms()) support.push_back({{"value", a.value}, {"mass", a.mass}});
    j["support"] = std::move(support);
  } else {
    j["kind"] = "curve";
    json bps = json::array();
    for (const Breakpoint& b : d.breakpoints()) bps.push_back({{"q", b.q}, {"v", b.v}});
    j["breakpoints"] = std::move(bps);
  }
  return j;
}

json to_json(const ProductPrior& p) {
  json j;
  j["family"] = to_string(p.family);
  if (p.family == Family::OneToH) j["H"] = p.H;
  json buyers = json::array();
  for (const auto& b : p.buyers) buyers.push_back(to_json(b));
  j["buyers"] = std::move(buyers);
  return j;
}

QuantileDistribution distribution_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    std::vector<Atom> atoms;
    for (const auto& a : j.at("support")) atoms.push_back({a.at("value").get<double>(), a.at("mass").get<double>()});
    return QuantileDistribution::discrete(std::move(atoms));
  }
  if (kind == "curve") {
    std::vector<Breakpoint> bps;
    for (const auto& b : j.at("breakpoints")) bps.push_back({b.at("q").get<double>(), b.at("v").get<double>()});
    return QuantileDistribution::curve(std::move(bps));
  }
  throw std::invalid_argument("unknown distribution kind: " + kind);
}

ProductPrior prior_from_json(const json& j) {
  ProductPrior p;
  if (j.contains("kind")) {
    p.buyers.push_back(distribution_from_json(j));
    return p;
  }
  p.family = family_from_string(j.value("family", std::string("unknown")));
  p.H = j.value("H", 0.0);
  for (const auto& b : j.at("buyers")) p.buyers.push_back(distribution_from_json(b));
  p.validate();
  return p;
}

ProductPrior load_prior(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prior file: " + path);
  try {
    return prior_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed prior file " + path + ": " + e.what());
  }
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tsa
