#include "mfgp/eval_kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mfgp {

Individual make_individual(std::vector<GeneTree> genes, const Dataset& data) {
    Individual ind;
    ind.model = fit_weights(std::move(genes), data);
    ind.objectives = model_objectives(ind.model, data);
    return ind;
}

std::vector<Individual>
evaluate_population_serial(const std::vector<std::vector<GeneTree>>& gene_sets,
                           const Dataset& data) {
    std::vector<Individual> out(gene_sets.size());
    for (std::size_t i = 0; i < gene_sets.size(); ++i)
        out[i] = make_individual(gene_sets[i], data);
    return out;
}

std::vector<Individual>
evaluate_population_parallel(const std::vector<std::vector<GeneTree>>& gene_sets,
                             const Dataset& data) {
    std::vector<Individual> out(gene_sets.size());
    std::exception_ptr first_error = nullptr;

#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(gene_sets.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                make_individual(gene_sets[static_cast<std::size_t>(i)], data);
        } catch (...) {
#pragma omp critical
            if (!first_error)
                first_error = std::current_exception();
        }
    }

    if (first_error)
        std::rethrow_exception(first_error);
    return out;
}

std::vector<Individual>
evaluate_population(const std::vector<std::vector<GeneTree>>& gene_sets,
                    const Dataset& data, ExecPolicy policy) {
    return policy == ExecPolicy::serial ? evaluate_population_serial(gene_sets, data)
                                        : evaluate_population_parallel(gene_sets, data);
}

} // namespace mfgp
