#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mfgp/dataset.hpp"
#include "mfgp/eval_kernels.hpp"
#include "mfgp/expr.hpp"
#include "mfgp/individual.hpp"
#include "mfgp/pareto.hpp"
#include "mfgp/rng.hpp"

namespace mfgp {

/// Run parameters. The defaults reproduce the reference setting: population
/// 100, 100 generations, function set {+,-}, at most 3 genes per individual,
/// trees no deeper than 5.
struct EvolutionConfig {
    std::size_t population_size = 100;
    std::size_t generations = 100;
    std::size_t gmax = 3; // max genes per individual
    std::size_t dmax = 5; // max tree depth, single leaf = depth 1
    std::size_t tournament_size = 2;
    double elite_fraction = 0.05;
    double crossover_prob = 0.85;
    double mutation_prob = 0.30;
    double high_level_crossover_fraction = 0.20;
    FunctionSet function_set;
    std::uint64_t seed = 0;
    double holdout_fraction = 0.0; // 0 = fit on all data
    ExecPolicy execution = ExecPolicy::parallel;

    void validate() const;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    std::size_t front_size = 0;
};

/// The non-dominated set over every individual evaluated during a run, plus
/// the per-generation history. Members are mutually non-dominated; an exact
/// structural duplicate of an existing member is never inserted twice.
struct ParetoArchive {
    std::vector<Individual> members;
    std::vector<GenerationStats> history;

    void insert(const Individual& candidate);
    /// True when some member is at least as good as `obj` in both objectives.
    bool covers(const ObjectivePair& obj) const;
    /// Smallest fitness among members.
    double best_fitness() const;
    /// Deterministic export order: ascending complexity, then fitness.
    void sort_members();
};

/// Assigns pareto_rank (1 = non-dominated) and crowding distance in place.
void assign_ranks(std::vector<Individual>& population);

std::vector<Individual> init_population(const Dataset& data,
                                        const EvolutionConfig& config, Rng& rng);

/// Uniform draws with replacement; lowest rank wins, ties go to the largest
/// crowding distance, then to a fair coin.
std::size_t tournament_select(std::span<const Individual> population, Rng& rng,
                              std::size_t tournament_size);

// Structural operator cores. These splice gene lists without refitting and are
// what the generational loop batches for parallel evaluation; the Individual
// wrappers below add the least-squares refit.
std::pair<std::vector<GeneTree>, std::vector<GeneTree>>
low_level_crossover_genes(const std::vector<GeneTree>& a,
                          const std::vector<GeneTree>& b, Rng& rng,
                          std::size_t dmax);
std::pair<std::vector<GeneTree>, std::vector<GeneTree>>
high_level_crossover_genes(const std::vector<GeneTree>& a,
                           const std::vector<GeneTree>& b, Rng& rng,
                           std::size_t gmax);
std::vector<GeneTree> mutate_genes(const std::vector<GeneTree>& genes, Rng& rng,
                                   const EvolutionConfig& config,
                                   std::size_t n_features);

/// Subtree swap between one randomly chosen gene of each parent. A swap that
/// would break the depth cap is redrawn up to 10 times, after which the
/// parents pass through unchanged.
std::pair<Individual, Individual> low_level_crossover(const Individual& p1,
                                                      const Individual& p2, Rng& rng,
                                                      std::size_t dmax,
                                                      const Dataset& data);

/// Exchange of a non-empty random gene subset between parents; children over
/// the gene cap lose uniformly chosen genes until they fit, then refit.
std::pair<Individual, Individual> high_level_crossover(const Individual& p1,
                                                       const Individual& p2, Rng& rng,
                                                       std::size_t gmax,
                                                       const Dataset& data);

/// Replaces a uniformly chosen node of a uniformly chosen gene with a fresh
/// subtree grown to fit the remaining depth budget, then refits.
Individual mutate(const Individual& parent, Rng& rng, const EvolutionConfig& config,
                  const Dataset& data);

using GenerationObserver =
    std::function<void(std::size_t generation, std::span<const Individual> population)>;

struct EvolveResult {
    ParetoArchive archive;
    std::vector<Individual> final_population;
    Dataset train;   // the rows actually fitted (post holdout split)
    Dataset holdout; // the held-out rows; equals train when no split
};

/// Runs the full generational loop. Deterministic for a fixed seed: every
/// stochastic choice is drawn sequentially from one generator before offspring
/// are (possibly concurrently) fitted, so results do not depend on the
/// execution policy or thread count.
EvolveResult evolve(const Dataset& data, const EvolutionConfig& config,
                    const GenerationObserver& observer = {});

enum class SelectionPolicy { best_r2, knee };

/// Picks the final model from an archive: best_r2 takes the member with the
/// highest validation R^2 (ties to lower complexity); knee takes the member
/// farthest from the line joining the front's extremes in normalized
/// objective space.
const Individual& select_final(const ParetoArchive& archive, const Dataset& validation,
                               SelectionPolicy policy);

} // namespace mfgp
