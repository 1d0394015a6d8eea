#pragma once

#include <string_view>

#include "ssdbench/grid.hpp"

namespace ssdbench {

/// Every cell gets 1/|X|.
SpatialDistribution uniform_baseline(const Domain& domain, std::string_view label, Task kind);

/// The ground truth itself. For the 2.5D task callers pass the lifted 2D
/// ground truth rather than the 2.5D one.
inline SpatialDistribution oracle(const SpatialDistribution& ground_truth) { return ground_truth; }

}  // namespace ssdbench
