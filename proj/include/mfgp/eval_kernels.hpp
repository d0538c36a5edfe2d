#pragma once

#include <vector>

#include "mfgp/dataset.hpp"
#include "mfgp/individual.hpp"

namespace mfgp {

enum class ExecPolicy { serial, parallel };

/// Fits one gene set against the dataset and scores its objectives.
Individual make_individual(std::vector<GeneTree> genes, const Dataset& data);

/// Serial reference kernel: one make_individual per gene set, in order.
std::vector<Individual>
evaluate_population_serial(const std::vector<std::vector<GeneTree>>& gene_sets,
                           const Dataset& data);

/// OpenMP kernel. Gene sets are independent and each is evaluated exactly as
/// in the serial kernel, so results are bit-identical to the reference for
/// any thread count.
std::vector<Individual>
evaluate_population_parallel(const std::vector<std::vector<GeneTree>>& gene_sets,
                             const Dataset& data);

std::vector<Individual>
evaluate_population(const std::vector<std::vector<GeneTree>>& gene_sets,
                    const Dataset& data, ExecPolicy policy);

} // namespace mfgp
