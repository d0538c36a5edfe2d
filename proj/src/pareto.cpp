#include "mfgp/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "mfgp/errors.hpp"

namespace mfgp {

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    if (a.fitness > b.fitness || a.complexity > b.complexity)
        return false;
    return a.fitness < b.fitness || a.complexity < b.complexity;
}

std::vector<std::vector<std::size_t>>
non_dominated_sort(std::span<const ObjectivePair> objectives) {
    const std::size_t n = objectives.size();
    if (n == 0)
        throw DataError("non_dominated_sort: empty objective list");

    std::vector<std::vector<std::size_t>> dominated_by(n); // i dominates these
    std::vector<std::size_t> domination_count(n, 0);       // how many dominate i
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objectives[j], objectives[i])) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0)
            current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current)
            for (std::size_t j : dominated_by[i])
                if (--domination_count[j] == 0)
                    next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const ObjectivePair> front) {
    const std::size_t n = front.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }

    auto accumulate_objective = [&](auto value_of) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return value_of(front[a]) < value_of(front[b]);
        });
        double lo = value_of(front[order.front()]);
        double hi = value_of(front[order.back()]);
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        if (hi == lo)
            return; // zero range contributes nothing
        for (std::size_t k = 1; k + 1 < n; ++k)
            distance[order[k]] +=
                (value_of(front[order[k + 1]]) - value_of(front[order[k - 1]])) /
                (hi - lo);
    };

    accumulate_objective([](const ObjectivePair& o) { return o.fitness; });
    accumulate_objective(
        [](const ObjectivePair& o) { return static_cast<double>(o.complexity); });
    return distance;
}

} // namespace mfgp
