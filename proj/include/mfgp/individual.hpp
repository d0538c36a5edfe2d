#pragma once

#include "mfgp/multigene.hpp"

namespace mfgp {

/// One population member: a fitted model, its two objective values, and the
/// NSGA bookkeeping used by selection.
struct Individual {
    MultiGeneModel model;
    ObjectivePair objectives;
    int pareto_rank = 0;    // 1 = non-dominated; 0 = not yet ranked
    double crowding = 0.0;
};

} // namespace mfgp
