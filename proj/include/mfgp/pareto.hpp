#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfgp/multigene.hpp"

namespace mfgp {

/// True iff a is no worse than b in both minimized objectives and strictly
/// better in at least one. Equal points never dominate each other.
bool dominates(const ObjectivePair& a, const ObjectivePair& b);

/// NSGA-style fast non-dominated sort. Front 0 of the result holds every point
/// dominated by none; front k holds points dominated only by earlier fronts.
/// Every input index appears in exactly one front.
std::vector<std::vector<std::size_t>>
non_dominated_sort(std::span<const ObjectivePair> objectives);

/// Crowding distances for one mutually non-dominated front. Boundary members
/// per objective get +inf; interior members accumulate the normalized gap
/// (next - previous) / (max - min) per objective, zero-range objectives
/// contributing nothing.
std::vector<double> crowding_distance(std::span<const ObjectivePair> front);

} // namespace mfgp
