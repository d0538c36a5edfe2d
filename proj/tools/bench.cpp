// Benchmark: serial vs OpenMP population evaluation on synthetic score data.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "mfgp/dataset.hpp"
#include "mfgp/eval_kernels.hpp"
#include "mfgp/evolution.hpp"
#include "mfgp/expr.hpp"
#include "mfgp/rng.hpp"

using namespace mfgp;

namespace {

Dataset synthetic_data(std::size_t samples, std::size_t features, Rng& rng) {
    Dataset data;
    for (std::size_t f = 0; f < features; ++f)
        data.schema.push_back("m" + std::to_string(f + 1));
    data.columns.assign(features, {});
    for (std::size_t f = 0; f < features; ++f) {
        data.columns[f].reserve(samples);
        for (std::size_t s = 0; s < samples; ++s)
            data.columns[f].push_back(rng.uniform_real());
    }
    data.target.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s)
        data.target.push_back(2.0 * data.columns[0][s] - data.columns[1][s] +
                              0.1 * rng.uniform_real());
    return data;
}

std::vector<std::vector<GeneTree>> synthetic_structures(std::size_t population,
                                                        std::size_t features,
                                                        Rng& rng) {
    FunctionSet fs = FunctionSet::from_string("+,-,*,/");
    std::vector<std::vector<GeneTree>> structures;
    structures.reserve(population);
    for (std::size_t i = 0; i < population; ++i) {
        std::size_t n_genes = 1 + rng.uniform_index(3);
        std::vector<GeneTree> genes;
        for (std::size_t g = 0; g < n_genes; ++g) {
            GrowMethod method = rng.bernoulli(0.5) ? GrowMethod::full : GrowMethod::grow;
            genes.push_back(random_tree(rng, features, fs, 5, method));
        }
        structures.push_back(std::move(genes));
    }
    return structures;
}

template <typename F>
double best_time_ms(F&& body, std::size_t repeats) {
    double best = 1e300;
    for (std::size_t r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        body();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

bool same_results(const std::vector<Individual>& a, const std::vector<Individual>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i].objectives == b[i].objectives))
            return false;
        if (a[i].model.weights != b[i].model.weights ||
            a[i].model.bias != b[i].model.bias)
            return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compare the serial and OpenMP population evaluation kernels"};
    std::size_t samples = 2000;
    std::size_t features = 16;
    std::size_t population = 200;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    int threads = 0;
    app.add_option("--samples", samples, "rows in the synthetic table");
    app.add_option("--features", features, "feature columns");
    app.add_option("--population", population, "gene sets to evaluate");
    app.add_option("--repeats", repeats, "take the best of this many timings");
    app.add_option("--seed", seed, "");
    app.add_option("--threads", threads, "cap OpenMP threads (0 = default)");
    CLI11_PARSE(app, argc, argv);

    if (threads > 0)
        omp_set_num_threads(threads);

    Rng rng(seed);
    Dataset data = synthetic_data(samples, features, rng);
    auto structures = synthetic_structures(population, features, rng);

    // warm up both paths (page-in, OpenMP pool spin-up)
    auto serial_result = evaluate_population_serial(structures, data);
    auto parallel_result = evaluate_population_parallel(structures, data);

    double serial_ms = best_time_ms(
        [&] { serial_result = evaluate_population_serial(structures, data); }, repeats);
    double parallel_ms = best_time_ms(
        [&] { parallel_result = evaluate_population_parallel(structures, data); },
        repeats);

    bool identical = same_results(serial_result, parallel_result);
    std::printf("samples %zu, features %zu, population %zu, max threads %d\n",
                samples, features, population, omp_get_max_threads());
    std::printf("serial    %9.3f ms\n", serial_ms);
    std::printf("parallel  %9.3f ms   (speedup %.2fx, results %s)\n", parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "DIFFER");
    return identical ? 0 : 1;
}
