// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "tsa/quantile_dist.hpp"

namespace tsa {

nlohmann::json to_json(const QuantileDistribution& d);
nlohmann::json to_json(const ProductPrior& p);

QuantileDistribution distribution_from_json(const nlohmann::json& j);
ProductPrior prior_from_json(const nlohmann::json& j);

/// Reads a product prior; a bare single-buyer document is accepted too.
ProductPrior load_prior(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

}  // namespace tsa
