// Acceptance gate: every release-blocking property of the engine, one
// [PASS]/[FAIL] line each. Exits nonzero if any criterion fails. The checks
// cross-validate the production code against the independent reference
// implementations in oracles.hpp, so a shared bug would have to be shared
// across two different algorithmic routes to slip through.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "mfgp/builtin.hpp"
#include "mfgp/errors.hpp"
#include "mfgp/evolution.hpp"
#include "mfgp/expr.hpp"
#include "mfgp/io.hpp"
#include "mfgp/multigene.hpp"
#include "mfgp/pareto.hpp"
#include "mfgp/quality.hpp"
#include "mfgp/rng.hpp"
#include "oracles.hpp"

using namespace mfgp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Dataset random_dataset(Rng& rng, std::size_t samples, std::size_t features) {
    Dataset d;
    for (std::size_t f = 0; f < features; ++f)
        d.schema.push_back("m" + std::to_string(f + 1));
    d.columns.assign(features, {});
    for (auto& col : d.columns) {
        col.reserve(samples);
        for (std::size_t s = 0; s < samples; ++s)
            col.push_back(rng.uniform_real());
    }
    d.target.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s)
        d.target.push_back(5.0 * rng.uniform_real());
    return d;
}

double normal_draw(Rng& rng, double sd) {
    double u1 = rng.uniform_real(), u2 = rng.uniform_real();
    while (u1 <= 0.0)
        u1 = rng.uniform_real();
    return sd * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::string temp_root() {
    static std::string dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("mfgp_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p.string();
    }();
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- 1: least-squares fits match the pseudo-inverse oracle ----------------

bool check_ols_oracle(std::string& note) {
    Rng rng(101);
    FunctionSet fs;
    fs.ops = {Op::add, Op::sub, Op::mul};
    auto start = Clock::now();
    double worst = 0.0;
    const int instances = 500;
    for (int t = 0; t < instances; ++t) {
        std::size_t features = 3 + rng.uniform_index(6);
        Dataset d = random_dataset(rng, 200, features);
        std::size_t n_genes = 1 + rng.uniform_index(5);
        std::vector<GeneTree> genes;
        for (std::size_t g = 0; g < n_genes; ++g)
            genes.push_back(random_tree(rng, features, fs, 1 + rng.uniform_index(4),
                                        rng.bernoulli(0.5) ? GrowMethod::grow
                                                           : GrowMethod::full));
        MultiGeneModel model = fit_weights(genes, d);
        std::vector<double> pred = predict(model, d);
        std::vector<double> ref = oracle::fit_predict(genes, d);
        for (std::size_t s = 0; s < pred.size(); ++s) {
            double err = std::abs(pred[s] - ref[s]) /
                         std::max({1.0, std::abs(pred[s]), std::abs(ref[s])});
            worst = std::max(worst, err);
        }
    }
    double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d instances, worst relative gap %.2e (limit 1e-09), %.1f s "
                  "(limit 10 s)",
                  instances, worst, elapsed);
    note = buf;
    return worst <= 1e-9 && elapsed < 10.0;
}

// ---- 2: non-dominated sorting matches brute force -------------------------

bool check_dominance_oracle(std::string& note) {
    Rng rng(202);
    const int sets = 1000;
    for (int t = 0; t < sets; ++t) {
        std::vector<ObjectivePair> objs;
        objs.reserve(200);
        for (int i = 0; i < 200; ++i)
            objs.push_back({static_cast<double>(rng.uniform_index(30)) / 4.0,
                            static_cast<long long>(1 + rng.uniform_index(40))});
        auto fast = non_dominated_sort(objs);
        auto ref = oracle::fronts(objs);
        for (auto& f : fast)
            std::sort(f.begin(), f.end());
        for (auto& f : ref)
            std::sort(f.begin(), f.end());
        if (fast != ref) {
            note = "front mismatch in set " + std::to_string(t);
            return false;
        }
    }
    note = std::to_string(sets) + " sets of 200 points, all fronts identical";
    return true;
}

// ---- 3: rank correlations match the naive oracles -------------------------

bool check_rank_oracles(std::string& note) {
    double exact = krcc(std::vector<double>{1.0, 2.0, 3.0},
                        std::vector<double>{1.0, 3.0, 2.0});
    if (exact != 1.0 / 3.0) {
        note = "krcc([1,2,3],[1,3,2]) != 1/3 exactly";
        return false;
    }

    Rng rng(303);
    double worst = 0.0;
    int done = 0;
    while (done < 500) {
        std::size_t n = 5 + rng.uniform_index(76);
        std::vector<double> a(n), b(n);
        bool tied = rng.bernoulli(0.5);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = tied ? static_cast<double>(rng.uniform_index(4))
                        : rng.uniform_real();
            b[i] = tied ? static_cast<double>(rng.uniform_index(4))
                        : rng.uniform_real();
        }
        auto flat = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(),
                               [&](double x) { return x == v[0]; });
        };
        if (flat(a) || flat(b))
            continue;
        worst = std::max(worst, std::abs(srcc(a, b) - oracle::srcc(a, b)));
        worst = std::max(worst, std::abs(krcc(a, b) - oracle::krcc(a, b)));
        ++done;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "500 vectors with and without ties, worst gap %.2e (limit 1e-12)",
                  worst);
    note = buf;
    return worst <= 1e-12;
}

// ---- 4: expressional complexity equals subtree enumeration ----------------

bool check_complexity_oracle(std::string& note) {
    std::vector<std::string> schema{"x1", "x2", "x3"};
    struct Fixed {
        const char* text;
        std::size_t value;
    };
    for (const Fixed& f : {Fixed{"x1", 1}, Fixed{"(+ x1 x2)", 5},
                           Fixed{"(- (+ x1 x2) x3)", 11}}) {
        GeneTree t = parse_sexpr(f.text, schema);
        if (tree_metrics(t).expressional_complexity != f.value) {
            note = std::string("fixed case '") + f.text + "' wrong";
            return false;
        }
    }

    Rng rng(404);
    FunctionSet fs;
    fs.ops = {Op::add, Op::sub, Op::mul, Op::div};
    for (int t = 0; t < 1000; ++t) {
        GeneTree tree = random_tree(rng, 6, fs, 1 + rng.uniform_index(6),
                                    rng.bernoulli(0.5) ? GrowMethod::grow
                                                       : GrowMethod::full);
        if (static_cast<long long>(tree_metrics(tree).expressional_complexity) !=
            oracle::expressional_complexity(tree)) {
            note = "enumeration mismatch on random tree " + std::to_string(t);
            return false;
        }
    }
    note = "fixed cases 1/5/11 and 1000 random trees, all exact";
    return true;
}

// ---- 5: structural caps hold through a full default run -------------------

bool check_constraint_soundness(std::string& note) {
    Rng data_rng(505);
    Dataset d = random_dataset(data_rng, 200, 16);
    // give the run a real signal so selection pressure is non-trivial
    for (std::size_t s = 0; s < d.sample_count(); ++s)
        d.target[s] = 2.0 * d.columns[0][s] - d.columns[5][s] +
                      0.5 * d.columns[9][s] + 0.1 * d.target[s];

    EvolutionConfig config; // stock defaults: 100 x 100, gmax 3, dmax 5
    config.seed = 1;
    std::size_t violations = 0;
    std::size_t generations_seen = 0;
    auto start = Clock::now();
    evolve(d, config, [&](std::size_t, std::span<const Individual> pop) {
        ++generations_seen;
        for (const Individual& ind : pop) {
            if (ind.model.gene_count() > 3)
                ++violations;
            for (const GeneTree& g : ind.model.genes)
                if (tree_depth(g) > 5)
                    ++violations;
        }
    });
    double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu violations across %zu observed generations of 100 "
                  "individuals, %.1f s (limit 60 s)",
                  violations, generations_seen, elapsed);
    note = buf;
    return violations == 0 && generations_seen == 101 && elapsed < 60.0;
}

// ---- 6: planted linear signal is recovered on the held-out rows -----------

bool check_synthetic_recovery(std::string& note) {
    Rng data_rng(606);
    Dataset d = random_dataset(data_rng, 200, 16);
    for (std::size_t s = 0; s < d.sample_count(); ++s)
        d.target[s] = 2.0 * d.columns[0][s] - 3.0 * d.columns[1][s] + 5.0 +
                      normal_draw(data_rng, 0.01);

    EvolutionConfig config;
    config.seed = 7;
    config.holdout_fraction = 0.25;
    EvolveResult result = evolve(d, config);

    // true-support reference: plain least squares on x1, x2 over the same
    // training rows, scored on the same held-out rows
    std::vector<std::vector<double>> design;
    design.push_back(std::vector<double>(result.train.sample_count(), 1.0));
    design.push_back(result.train.columns[0]);
    design.push_back(result.train.columns[1]);
    std::vector<double> w = oracle::least_squares(design, result.train.target);
    std::vector<double> ref_pred(result.holdout.sample_count());
    for (std::size_t s = 0; s < ref_pred.size(); ++s)
        ref_pred[s] = w[0] + w[1] * result.holdout.columns[0][s] +
                      w[2] * result.holdout.columns[1][s];
    double ref_r2 = oracle::r_squared(ref_pred, result.holdout.target);

    const std::vector<std::int32_t> support{0, 1};
    double best_r2 = -1.0;
    bool found = false;
    for (const Individual& member : result.archive.members) {
        bool clean = true;
        for (const GeneTree& g : member.model.genes)
            clean = clean && g.uses_only(support);
        if (!clean)
            continue;
        std::vector<double> pred = predict(member.model, result.holdout);
        double r2 = r_squared(pred, result.holdout.fitting_target());
        best_r2 = std::max(best_r2, r2);
        if (r2 >= 0.999 && std::abs(r2 - ref_r2) <= 1e-3)
            found = true;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "best holdout R^2 over x1/x2-only archive members %.6f, "
                  "reference %.6f (need >= 0.999 and gap <= 1e-3)",
                  best_r2, ref_r2);
    note = buf;
    return found;
}

// ---- 7: shipped fusion models carry their exact published shape -----------

bool check_builtin_fidelity(std::string& note) {
    struct Expected {
        BuiltinModelId id;
        double bias;
        std::set<std::string> measures;
    };
    const std::vector<Expected> expected{
        {BuiltinModelId::mfmogp1,
         -114.9,
         {"GSM", "FSIM", "IFC", "IWSSIM", "MAD", "NQM", "VIF", "IFS"}},
        {BuiltinModelId::mfmogp2,
         -0.5207,
         {"GSM", "VSI", "MAD", "MSSIM", "RFSIM", "SRSIM", "VIF", "IFS", "SFF"}},
        {BuiltinModelId::mfmogp3,
         -11.37,
         {"VSI", "IWSSIM", "MAD", "NQM", "PSNR", "RFSIM", "SRSIM", "SSIM", "VIF",
          "IFS"}},
        {BuiltinModelId::mfmogp4,
         -13.96,
         {"VSI", "FSIM", "FSIMC", "GSM", "MAD", "MSSIM", "PSNR", "VIF", "IFS"}}};

    MeasureRow zero;
    for (const Expected& e : expected) {
        if (builtin_predict(e.id, zero) != e.bias) {
            note = std::string(builtin_name(e.id)) + " zero-row prediction is not " +
                   fmt_double(e.bias);
            return false;
        }
        MultiGeneModel model = builtin_model(e.id);
        std::set<std::string> seen;
        for (const GeneTree& g : model.genes) {
            if (g.nodes.size() != 1 || !g.nodes[0].is_leaf()) {
                note = std::string(builtin_name(e.id)) + " has a non-leaf gene";
                return false;
            }
            seen.insert(model.schema[static_cast<std::size_t>(g.nodes[0].var)]);
        }
        if (seen != e.measures) {
            note = std::string(builtin_name(e.id)) + " measure set mismatch";
            return false;
        }
    }
    note = "all four models: exact zero-row bias and exact measure sets";
    return true;
}

// ---- 8: the CLI is byte-deterministic -------------------------------------

bool check_cli_determinism(std::string& note) {
    std::string root = temp_root();
    std::string csv = root + "/determinism.csv";
    {
        Rng rng(808);
        Dataset d = random_dataset(rng, 60, 5);
        std::ofstream out(csv);
        out << "id,m1,m2,m3,m4,m5,score\n";
        for (std::size_t s = 0; s < d.sample_count(); ++s) {
            out << "r" << s;
            for (std::size_t f = 0; f < 5; ++f)
                out << ',' << fmt_double(d.columns[f][s]);
            out << ',' << fmt_double(2.0 * d.columns[0][s] - d.columns[2][s]) << "\n";
        }
    }
    auto run_once = [&](const std::string& dir) {
        std::string cmd = std::string(MFGP_BIN) + " evolve --data " + csv +
                          " --target score --id id --population-size 20" +
                          " --generations 6 --seed 3 --out-dir " + dir +
                          " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    };
    if (!run_once(root + "/det_a") || !run_once(root + "/det_b")) {
        note = "mfgp evolve did not exit cleanly";
        return false;
    }
    std::string a = slurp(root + "/det_a/archive.json");
    std::string b = slurp(root + "/det_b/archive.json");
    if (a.empty() || a != b) {
        note = "archive.json differs between identical runs";
        return false;
    }
    note = "two identical CLI runs, archive.json byte-identical (" +
           std::to_string(a.size()) + " bytes)";
    return true;
}

// ---- 9: logistic mapping never hurts, and preserves ranks when monotone ---

bool check_logistic_sanity(std::string& note) {
    Rng rng(909);
    int monotone = 0;
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 20 + rng.uniform_index(41);
        std::vector<double> x(n), y(n);
        double scale = 1.0 + 4.0 * rng.uniform_real();
        bool sigmoid = rng.bernoulli(0.5);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform_real() * 6.0 - 3.0;
            double base = sigmoid ? scale / (1.0 + std::exp(-1.5 * x[i]))
                                  : 0.8 * scale * x[i];
            y[i] = base + 0.05 * scale * (rng.uniform_real() - 0.5);
        }
        LogisticFit fit = logistic_fit(x, y);
        double line = oracle::linear_sse(x, y);
        if (!(fit.sse <= line + 1e-9)) {
            char buf[120];
            std::snprintf(buf, sizeof buf,
                          "fixture %d: fitted SSE %.6g exceeds linear SSE %.6g", t,
                          fit.sse, line);
            note = buf;
            return false;
        }

        std::vector<double> mapped = logistic_apply(fit.beta, x);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        bool strictly_up = true;
        for (std::size_t k = 1; k < n; ++k)
            strictly_up = strictly_up && mapped[order[k - 1]] < mapped[order[k]];
        if (strictly_up) {
            ++monotone;
            if (srcc(mapped, y) != srcc(x, y) || krcc(mapped, y) != krcc(x, y)) {
                note = "monotone map changed a rank correlation in fixture " +
                       std::to_string(t);
                return false;
            }
        }
    }
    if (monotone == 0) {
        note = "no fixture produced a strictly monotone fitted map";
        return false;
    }
    note = "100 fixtures: SSE never above the line fit; " +
           std::to_string(monotone) +
           " strictly monotone maps left srcc/krcc bit-identical";
    return true;
}

// ---- 10: archive best fitness never worsens -------------------------------

bool check_archive_monotonicity(std::string& note) {
    Rng data_rng(1010);
    Dataset d = random_dataset(data_rng, 80, 6);
    for (std::size_t s = 0; s < d.sample_count(); ++s)
        d.target[s] = d.columns[0][s] - 2.0 * d.columns[3][s] + 0.2 * d.target[s];

    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        EvolutionConfig config;
        config.population_size = 30;
        config.generations = 15;
        config.seed = seed;
        EvolveResult result = evolve(d, config);
        const auto& history = result.archive.history;
        if (history.size() != config.generations + 1) {
            note = "seed " + std::to_string(seed) + ": wrong history length";
            return false;
        }
        for (std::size_t g = 1; g < history.size(); ++g) {
            if (history[g].best_fitness > history[g - 1].best_fitness) {
                note = "seed " + std::to_string(seed) + ": best fitness rose at " +
                       "generation " + std::to_string(g);
                return false;
            }
        }
    }
    note = "20 seeded runs, best archive fitness non-increasing in every one";
    return true;
}

} // namespace

int main() {
    struct Criterion {
        const char* label;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> criteria{
        {"least-squares fits match the pseudo-inverse oracle", check_ols_oracle},
        {"non-dominated sorting matches brute force", check_dominance_oracle},
        {"srcc/krcc match the naive rank oracles", check_rank_oracles},
        {"expressional complexity equals subtree enumeration",
         check_complexity_oracle},
        {"gene and depth caps hold through a full default run",
         check_constraint_soundness},
        {"planted linear signal recovered on held-out rows",
         check_synthetic_recovery},
        {"shipped fusion models keep their exact published shape",
         check_builtin_fidelity},
        {"identical CLI runs produce byte-identical archives",
         check_cli_determinism},
        {"logistic mapping never hurts and preserves ranks when monotone",
         check_logistic_sanity},
        {"best archive fitness is non-increasing over generations",
         check_archive_monotonicity},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string note;
        bool ok = false;
        try {
            ok = criteria[i].fn(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %2zu. %s — %s\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].label, note.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
    if (failures > 0)
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    else
        std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}
