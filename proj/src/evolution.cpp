#include "mfgp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfgp/errors.hpp"

namespace mfgp {

namespace {

void require_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(v));
}

} // namespace

void EvolutionConfig::validate() const {
    if (population_size < 2)
        throw ConfigError("population_size must be >= 2");
    if (gmax < 1)
        throw ConfigError("gmax must be >= 1");
    if (dmax < 1)
        throw ConfigError("dmax must be >= 1");
    if (tournament_size < 1)
        throw ConfigError("tournament_size must be >= 1");
    require_probability(elite_fraction, "elite_fraction");
    require_probability(crossover_prob, "crossover_prob");
    require_probability(mutation_prob, "mutation_prob");
    require_probability(high_level_crossover_fraction, "high_level_crossover_fraction");
    require_probability(holdout_fraction, "holdout_fraction");
    if (holdout_fraction >= 1.0)
        throw ConfigError("holdout_fraction must be < 1");
    if (crossover_prob + mutation_prob <= 0.0)
        throw ConfigError("crossover_prob and mutation_prob cannot both be 0");
    function_set.validate();
}

void ParetoArchive::insert(const Individual& candidate) {
    if (!std::isfinite(candidate.objectives.fitness))
        return; // poisoned models never reach the front
    for (const Individual& member : members) {
        if (dominates(member.objectives, candidate.objectives))
            return;
        if (member.objectives == candidate.objectives &&
            member.model.same_structure(candidate.model))
            return; // exact duplicate
    }
    std::erase_if(members, [&](const Individual& member) {
        return dominates(candidate.objectives, member.objectives);
    });
    members.push_back(candidate);
    members.back().pareto_rank = 1;
}

bool ParetoArchive::covers(const ObjectivePair& obj) const {
    if (!std::isfinite(obj.fitness))
        return true;
    for (const Individual& member : members)
        if (member.objectives.fitness <= obj.fitness &&
            member.objectives.complexity <= obj.complexity)
            return true;
    return false;
}

double ParetoArchive::best_fitness() const {
    if (members.empty())
        throw DataError("archive is empty: every evaluated model had non-finite fitness");
    double best = std::numeric_limits<double>::infinity();
    for (const Individual& member : members)
        best = std::min(best, member.objectives.fitness);
    return best;
}

void ParetoArchive::sort_members() {
    std::stable_sort(members.begin(), members.end(),
                     [](const Individual& a, const Individual& b) {
                         if (a.objectives.complexity != b.objectives.complexity)
                             return a.objectives.complexity < b.objectives.complexity;
                         return a.objectives.fitness < b.objectives.fitness;
                     });
}

void assign_ranks(std::vector<Individual>& population) {
    if (population.empty())
        return;
    std::vector<ObjectivePair> objectives(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        objectives[i] = population[i].objectives;
    auto fronts = non_dominated_sort(objectives);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<ObjectivePair> front_objs;
        front_objs.reserve(fronts[f].size());
        for (std::size_t idx : fronts[f])
            front_objs.push_back(objectives[idx]);
        std::vector<double> crowd = crowding_distance(front_objs);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            population[fronts[f][k]].pareto_rank = static_cast<int>(f) + 1;
            population[fronts[f][k]].crowding = crowd[k];
        }
    }
}

namespace {

std::size_t elite_count_of(const EvolutionConfig& config) {
    double raw = config.elite_fraction * static_cast<double>(config.population_size);
    auto count = static_cast<std::size_t>(std::ceil(raw - 1e-12));
    return std::min(count, config.population_size);
}

std::vector<GeneTree> random_gene_set(Rng& rng, const EvolutionConfig& config,
                                      std::size_t n_features) {
    // ramped half-and-half: gene count uniform in 1..gmax, each tree built at
    // a uniform depth cap in min(2,dmax)..dmax, grow or full on a fair coin
    std::size_t n_genes = 1 + rng.uniform_index(config.gmax);
    std::size_t lo = std::min<std::size_t>(2, config.dmax);
    std::vector<GeneTree> genes;
    genes.reserve(n_genes);
    for (std::size_t g = 0; g < n_genes; ++g) {
        std::size_t depth = lo + rng.uniform_index(config.dmax - lo + 1);
        GrowMethod method = rng.bernoulli(0.5) ? GrowMethod::full : GrowMethod::grow;
        genes.push_back(
            random_tree(rng, n_features, config.function_set, depth, method));
    }
    return genes;
}

} // namespace

std::vector<Individual> init_population(const Dataset& data,
                                        const EvolutionConfig& config, Rng& rng) {
    config.validate();
    std::vector<std::vector<GeneTree>> structures;
    structures.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i)
        structures.push_back(random_gene_set(rng, config, data.feature_count()));
    return evaluate_population(structures, data, config.execution);
}

std::size_t tournament_select(std::span<const Individual> population, Rng& rng,
                              std::size_t tournament_size) {
    if (population.empty())
        throw DataError("tournament_select: empty population");
    if (tournament_size < 1)
        throw ConfigError("tournament_size must be >= 1");

    std::vector<std::size_t> candidates(tournament_size);
    for (std::size_t k = 0; k < tournament_size; ++k)
        candidates[k] = rng.uniform_index(population.size());

    auto better = [&](std::size_t a, std::size_t b) {
        if (population[a].pareto_rank != population[b].pareto_rank)
            return population[a].pareto_rank < population[b].pareto_rank;
        return population[a].crowding > population[b].crowding;
    };
    std::size_t best = candidates[0];
    for (std::size_t k = 1; k < tournament_size; ++k)
        if (better(candidates[k], best))
            best = candidates[k];

    std::vector<std::size_t> tied;
    for (std::size_t c : candidates)
        if (population[c].pareto_rank == population[best].pareto_rank &&
            population[c].crowding == population[best].crowding)
            tied.push_back(c);
    if (tied.size() <= 1)
        return best;
    return tied[rng.uniform_index(tied.size())];
}

namespace {

constexpr int kDepthRetryLimit = 10;

GeneTree splice_subtree(const GeneTree& host, std::size_t at, const GeneTree& donor,
                        std::size_t donor_at) {
    GeneTree out;
    std::size_t host_end = host.subtree_end(at);
    std::size_t donor_end = donor.subtree_end(donor_at);
    out.nodes.reserve(host.nodes.size() - (host_end - at) + (donor_end - donor_at));
    out.nodes.insert(out.nodes.end(), host.nodes.begin(),
                     host.nodes.begin() + static_cast<std::ptrdiff_t>(at));
    out.nodes.insert(out.nodes.end(),
                     donor.nodes.begin() + static_cast<std::ptrdiff_t>(donor_at),
                     donor.nodes.begin() + static_cast<std::ptrdiff_t>(donor_end));
    out.nodes.insert(out.nodes.end(),
                     host.nodes.begin() + static_cast<std::ptrdiff_t>(host_end),
                     host.nodes.end());
    return out;
}

} // namespace

std::pair<std::vector<GeneTree>, std::vector<GeneTree>>
low_level_crossover_genes(const std::vector<GeneTree>& a,
                          const std::vector<GeneTree>& b, Rng& rng,
                          std::size_t dmax) {
    for (int attempt = 0; attempt < kDepthRetryLimit; ++attempt) {
        std::size_t ga = rng.uniform_index(a.size());
        std::size_t gb = rng.uniform_index(b.size());
        std::size_t na = rng.uniform_index(a[ga].node_count());
        std::size_t nb = rng.uniform_index(b[gb].node_count());
        GeneTree child_a = splice_subtree(a[ga], na, b[gb], nb);
        GeneTree child_b = splice_subtree(b[gb], nb, a[ga], na);
        if (tree_depth(child_a) > dmax || tree_depth(child_b) > dmax)
            continue;
        auto genes_a = a;
        auto genes_b = b;
        genes_a[ga] = std::move(child_a);
        genes_b[gb] = std::move(child_b);
        return {std::move(genes_a), std::move(genes_b)};
    }
    return {a, b}; // every swap broke the depth cap; parents pass through
}

std::pair<std::vector<GeneTree>, std::vector<GeneTree>>
high_level_crossover_genes(const std::vector<GeneTree>& a,
                           const std::vector<GeneTree>& b, Rng& rng,
                           std::size_t gmax) {
    auto draw_mask = [&](std::size_t n) {
        std::vector<bool> mask(n);
        for (;;) {
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                mask[i] = rng.bernoulli(0.5);
                any = any || mask[i];
            }
            if (any)
                return mask;
        }
    };
    std::vector<bool> pick_a = draw_mask(a.size());
    std::vector<bool> pick_b = draw_mask(b.size());

    auto build_child = [](const std::vector<GeneTree>& keep_from,
                          const std::vector<bool>& given_away,
                          const std::vector<GeneTree>& take_from,
                          const std::vector<bool>& taken) {
        std::vector<GeneTree> child;
        for (std::size_t i = 0; i < keep_from.size(); ++i)
            if (!given_away[i])
                child.push_back(keep_from[i]);
        for (std::size_t i = 0; i < take_from.size(); ++i)
            if (taken[i])
                child.push_back(take_from[i]);
        return child;
    };
    std::vector<GeneTree> child_a = build_child(a, pick_a, b, pick_b);
    std::vector<GeneTree> child_b = build_child(b, pick_b, a, pick_a);

    auto enforce_gmax = [&](std::vector<GeneTree>& genes) {
        while (genes.size() > gmax)
            genes.erase(genes.begin() +
                        static_cast<std::ptrdiff_t>(rng.uniform_index(genes.size())));
    };
    enforce_gmax(child_a);
    enforce_gmax(child_b);
    return {std::move(child_a), std::move(child_b)};
}

std::vector<GeneTree> mutate_genes(const std::vector<GeneTree>& genes, Rng& rng,
                                   const EvolutionConfig& config,
                                   std::size_t n_features) {
    for (int attempt = 0; attempt < kDepthRetryLimit; ++attempt) {
        std::size_t g = rng.uniform_index(genes.size());
        std::size_t node = rng.uniform_index(genes[g].node_count());
        std::size_t node_depth = genes[g].node_depth(node);
        std::size_t budget = config.dmax - node_depth + 1;
        GeneTree replacement =
            random_tree(rng, n_features, config.function_set, budget, GrowMethod::grow);
        GeneTree mutated = splice_subtree(genes[g], node, replacement, 0);
        if (tree_depth(mutated) > config.dmax)
            continue; // cannot happen with a grown-to-budget subtree; kept as a guard
        auto out = genes;
        out[g] = std::move(mutated);
        return out;
    }
    return genes;
}

std::pair<Individual, Individual> low_level_crossover(const Individual& p1,
                                                      const Individual& p2, Rng& rng,
                                                      std::size_t dmax,
                                                      const Dataset& data) {
    auto [genes_a, genes_b] =
        low_level_crossover_genes(p1.model.genes, p2.model.genes, rng, dmax);
    return {make_individual(std::move(genes_a), data),
            make_individual(std::move(genes_b), data)};
}

std::pair<Individual, Individual> high_level_crossover(const Individual& p1,
                                                       const Individual& p2, Rng& rng,
                                                       std::size_t gmax,
                                                       const Dataset& data) {
    auto [genes_a, genes_b] =
        high_level_crossover_genes(p1.model.genes, p2.model.genes, rng, gmax);
    return {make_individual(std::move(genes_a), data),
            make_individual(std::move(genes_b), data)};
}

Individual mutate(const Individual& parent, Rng& rng, const EvolutionConfig& config,
                  const Dataset& data) {
    return make_individual(
        mutate_genes(parent.model.genes, rng, config, data.feature_count()), data);
}

namespace {

bool has_variance(const std::vector<double>& y) {
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] != y[0])
            return true;
    return false;
}

std::vector<std::size_t> elite_order(const std::vector<Individual>& population) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (population[a].pareto_rank != population[b].pareto_rank)
            return population[a].pareto_rank < population[b].pareto_rank;
        return population[a].crowding > population[b].crowding;
    });
    return order;
}

// Truncates the merged parent+offspring pool to `target` members: whole
// fronts first, the last partial front by descending crowding.
std::vector<Individual> truncate_by_fronts(std::vector<Individual>& merged,
                                           std::size_t target) {
    std::vector<ObjectivePair> objectives(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i)
        objectives[i] = merged[i].objectives;
    auto fronts = non_dominated_sort(objectives);

    std::vector<Individual> next;
    next.reserve(target);
    for (const auto& front : fronts) {
        if (next.size() >= target)
            break;
        if (next.size() + front.size() <= target) {
            for (std::size_t idx : front)
                next.push_back(std::move(merged[idx]));
            continue;
        }
        std::vector<ObjectivePair> front_objs;
        front_objs.reserve(front.size());
        for (std::size_t idx : front)
            front_objs.push_back(objectives[idx]);
        std::vector<double> crowd = crowding_distance(front_objs);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return crowd[a] > crowd[b];
        });
        for (std::size_t k = 0; next.size() < target; ++k)
            next.push_back(std::move(merged[front[order[k]]]));
    }
    return next;
}

} // namespace

EvolveResult evolve(const Dataset& data, const EvolutionConfig& config,
                    const GenerationObserver& observer) {
    config.validate();
    data.validate();
    if (data.sample_count() < config.gmax + 2)
        throw DataError("dataset needs at least gmax+2 = " +
                        std::to_string(config.gmax + 2) + " samples, got " +
                        std::to_string(data.sample_count()));

    Rng rng(config.seed);
    EvolveResult result;

    // rng draw order: holdout permutation (if any), then initial population,
    // then the per-generation offspring events
    std::size_t holdout_count = static_cast<std::size_t>(std::floor(
        config.holdout_fraction * static_cast<double>(data.sample_count()) + 1e-9));
    if (holdout_count > 0) {
        std::vector<std::size_t> perm(data.sample_count());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = perm.size() - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        std::vector<std::size_t> holdout_rows(perm.begin(),
                                              perm.begin() +
                                                  static_cast<std::ptrdiff_t>(holdout_count));
        std::vector<std::size_t> train_rows(perm.begin() +
                                                static_cast<std::ptrdiff_t>(holdout_count),
                                            perm.end());
        std::sort(holdout_rows.begin(), holdout_rows.end());
        std::sort(train_rows.begin(), train_rows.end());
        if (train_rows.size() < config.gmax + 2)
            throw ConfigError("holdout_fraction leaves only " +
                              std::to_string(train_rows.size()) +
                              " training samples, need at least " +
                              std::to_string(config.gmax + 2));
        if (holdout_rows.size() < 2)
            throw ConfigError("holdout_fraction leaves fewer than 2 holdout samples");
        result.train = data.subset(train_rows);
        result.holdout = data.subset(holdout_rows);
    } else {
        result.train = data;
        result.holdout = data;
    }
    const Dataset& train = result.train;
    if (!has_variance(train.fitting_target()))
        throw DataError("target has zero variance on the training rows");

    std::vector<Individual> population = init_population(train, config, rng);
    assign_ranks(population);
    ParetoArchive& archive = result.archive;
    for (const Individual& ind : population)
        archive.insert(ind);
    archive.history.push_back({0, archive.best_fitness(), archive.members.size()});
    if (observer)
        observer(0, population);

    const double event_total = config.crossover_prob + config.mutation_prob +
                               std::max(0.0, 1.0 - config.crossover_prob -
                                                 config.mutation_prob);
    const double p_crossover = config.crossover_prob / event_total;
    const double p_mutation = config.mutation_prob / event_total;
    const std::size_t n_elite = elite_count_of(config);
    const std::size_t n_features = train.feature_count();

    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        // 1. draw every stochastic choice sequentially
        std::vector<std::vector<GeneTree>> structures;
        const std::size_t need = config.population_size - n_elite;
        structures.reserve(need);
        while (structures.size() < need) {
            double event = rng.uniform_real();
            if (event < p_crossover) {
                std::size_t i1 =
                    tournament_select(population, rng, config.tournament_size);
                std::size_t i2 =
                    tournament_select(population, rng, config.tournament_size);
                bool high_level = rng.bernoulli(config.high_level_crossover_fraction);
                auto [c1, c2] =
                    high_level
                        ? high_level_crossover_genes(population[i1].model.genes,
                                                     population[i2].model.genes, rng,
                                                     config.gmax)
                        : low_level_crossover_genes(population[i1].model.genes,
                                                    population[i2].model.genes, rng,
                                                    config.dmax);
                structures.push_back(std::move(c1));
                if (structures.size() < need)
                    structures.push_back(std::move(c2));
            } else if (event < p_crossover + p_mutation) {
                std::size_t i =
                    tournament_select(population, rng, config.tournament_size);
                structures.push_back(
                    mutate_genes(population[i].model.genes, rng, config, n_features));
            } else {
                std::size_t i =
                    tournament_select(population, rng, config.tournament_size);
                structures.push_back(population[i].model.genes); // reproduction
            }
        }

        // 2. fit and score offspring (parallel kernel; order-independent)
        std::vector<Individual> offspring =
            evaluate_population(structures, train, config.execution);
        for (const Individual& ind : offspring)
            archive.insert(ind);

        // 3. survivors: parents + elite copies + offspring, truncated by
        //    non-dominated sort with crowding tie-break
        std::vector<std::size_t> order = elite_order(population);
        std::vector<Individual> merged;
        merged.reserve(2 * config.population_size);
        for (const Individual& ind : population)
            merged.push_back(ind);
        for (std::size_t k = 0; k < n_elite; ++k)
            merged.push_back(population[order[k]]);
        for (Individual& ind : offspring)
            merged.push_back(std::move(ind));
        population = truncate_by_fronts(merged, config.population_size);
        assign_ranks(population);

        archive.history.push_back({gen, archive.best_fitness(), archive.members.size()});
        if (observer)
            observer(gen, population);
    }

    archive.sort_members();
    result.final_population = std::move(population);
    return result;
}

const Individual& select_final(const ParetoArchive& archive, const Dataset& validation,
                               SelectionPolicy policy) {
    if (archive.members.empty())
        throw DataError("select_final: empty archive");
    const std::vector<Individual>& members = archive.members;
    if (members.size() == 1)
        return members.front();

    if (policy == SelectionPolicy::best_r2) {
        std::vector<double> y = validation.fitting_target();
        std::size_t best = 0;
        double best_r2 = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < members.size(); ++i) {
            double r2 = r_squared(predict(members[i].model, validation), y);
            bool wins = r2 > best_r2 ||
                        (r2 == best_r2 && members[i].objectives.complexity <
                                              members[best].objectives.complexity);
            if (i == 0 || wins) {
                best = i;
                best_r2 = r2;
            }
        }
        return members[best];
    }

    // knee: farthest member from the line joining the normalized extremes
    double f_lo = std::numeric_limits<double>::infinity(), f_hi = -f_lo;
    double c_lo = std::numeric_limits<double>::infinity(), c_hi = -c_lo;
    for (const Individual& m : members) {
        f_lo = std::min(f_lo, m.objectives.fitness);
        f_hi = std::max(f_hi, m.objectives.fitness);
        c_lo = std::min(c_lo, static_cast<double>(m.objectives.complexity));
        c_hi = std::max(c_hi, static_cast<double>(m.objectives.complexity));
    }
    double f_range = f_hi - f_lo, c_range = c_hi - c_lo;
    if (f_range == 0.0 || c_range == 0.0)
        return members.front(); // degenerate front: no geometry to exploit

    auto normalized = [&](const Individual& m) {
        return std::pair<double, double>{
            (m.objectives.fitness - f_lo) / f_range,
            (static_cast<double>(m.objectives.complexity) - c_lo) / c_range};
    };
    // extremes of a mutually non-dominated set: min complexity has max
    // fitness and vice versa, so these are the front's two endpoints
    auto [ax, ay] = std::pair<double, double>{1.0, 0.0};
    auto [bx, by] = std::pair<double, double>{0.0, 1.0};
    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        auto [px, py] = normalized(members[i]);
        double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        double dist = std::abs(cross) / std::hypot(bx - ax, by - ay);
        if (dist > best_dist) {
            best = i;
            best_dist = dist;
        }
    }
    return members[best];
}

} // namespace mfgp
