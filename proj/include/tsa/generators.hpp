// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "tsa/quantile_dist.hpp"

namespace tsa {

struct GenShape {
  std::size_t n = 1;
  std::size_t support = 10;
  double H = 16.0;  // OneToH only
};

/// Random product prior of the given family. Every output passes
/// `check_family`; a failing draw is retried up to 100 times.
ProductPrior gen_family(Family family, const GenShape& shape, std::uint64_t seed);

/// Family invariant: range for Unit01/OneToH, concave revenue curve for
/// Regular, concave curve with nondecreasing virtual slope gaps for MHR.
bool check_family(const ProductPrior& prior);

/// Whether the revenue curve of d is concave (ironing keeps every point).
bool is_regular(const QuantileDistribution& d);

// Lower-bound instance families. All return Curve-kind priors.

/// Revenue tent (0,0)-(1/2,1)-(1,0) after `s` rounds of top-triangle
/// splitting; bit l of `index` picks the branch at round l + 1.
QuantileDistribution gen_top_triangle(unsigned s, std::uint64_t index);

/// Number of admissible hill sites for the unit hill family: floor(1/(8 eps)).
std::size_t unit_hill_sites(double eps);
/// R(q) = q below 1/2, a slope-1/2 hill on [1/2 + 4 s eps, 1/2 + 4 (s+1) eps),
/// and 1/2 elsewhere.
QuantileDistribution gen_unit_hill(double eps, std::size_t s);
/// Quantile just inside the right end of hill s, where revenue peaks.
double unit_hill_peak_quantile(double eps, std::size_t s);

/// Number of admissible sites s >= 1 for the geometric hill family.
std::size_t geo_hill_sites(double eps, double H);
/// R(q) = H q below 1/H, H (1+2 eps)^(1-s) q on
/// [(1+2 eps)^(s-1)/H, (1+2 eps)^s/H), and 1 elsewhere.
QuantileDistribution gen_geo_hill(double eps, double H, std::size_t s);
double geo_hill_peak_quantile(double eps, double H, std::size_t s);

}  // namespace tsa
