// mfgp: evolve, apply and score multigene fusion models for quality data.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"

#include "mfgp/builtin.hpp"
#include "mfgp/errors.hpp"
#include "mfgp/evolution.hpp"
#include "mfgp/io.hpp"
#include "mfgp/multigene.hpp"
#include "mfgp/quality.hpp"

namespace fs = std::filesystem;
using namespace mfgp;

namespace {

std::string short_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_linear(const MultiGeneModel& model) {
    std::string out = "y = " + short_num(model.bias);
    for (std::size_t i = 0; i < model.genes.size(); ++i) {
        double w = model.weights[i];
        out += w < 0 ? " - " : " + ";
        out += short_num(std::abs(w));
        out += "*";
        out += print_sexpr_named(model.genes[i], model.schema);
    }
    return out;
}

double plain_r2(const MultiGeneModel& model, const Dataset& data) {
    std::vector<double> pred = predict(model, data);
    for (double v : pred)
        if (!std::isfinite(v))
            return -std::numeric_limits<double>::infinity();
    return r_squared(pred, data.fitting_target());
}

TargetDirection direction_from(const std::string& s) {
    return s == "lower" ? TargetDirection::lower_better
                        : TargetDirection::higher_better;
}

// ---- evolve ---------------------------------------------------------------

struct EvolveOpts {
    std::string data_path;
    std::string target;
    std::string id_column;
    std::vector<std::string> features;
    std::string direction = "higher";
    std::string config_path;
    std::string out_dir = ".";
    std::string policy = "best_r2";
    std::string execution;
    std::string function_set;
    std::size_t runs = 1;
    EvolutionConfig flags; // flag values land here, then override the config

    CLI::Option* op_population = nullptr;
    CLI::Option* op_generations = nullptr;
    CLI::Option* op_gmax = nullptr;
    CLI::Option* op_dmax = nullptr;
    CLI::Option* op_tournament = nullptr;
    CLI::Option* op_elite = nullptr;
    CLI::Option* op_crossover = nullptr;
    CLI::Option* op_mutation = nullptr;
    CLI::Option* op_hlx = nullptr;
    CLI::Option* op_seed = nullptr;
    CLI::Option* op_holdout = nullptr;
    CLI::Option* op_function_set = nullptr;
    CLI::Option* op_execution = nullptr;
};

void run_evolve(const EvolveOpts& o) {
    EvolutionConfig config;
    if (!o.config_path.empty())
        apply_config(config, read_config_file(o.config_path));

    auto take = [&](CLI::Option* opt, auto member) {
        if (opt->count() > 0)
            config.*member = o.flags.*member;
    };
    take(o.op_population, &EvolutionConfig::population_size);
    take(o.op_generations, &EvolutionConfig::generations);
    take(o.op_gmax, &EvolutionConfig::gmax);
    take(o.op_dmax, &EvolutionConfig::dmax);
    take(o.op_tournament, &EvolutionConfig::tournament_size);
    take(o.op_elite, &EvolutionConfig::elite_fraction);
    take(o.op_crossover, &EvolutionConfig::crossover_prob);
    take(o.op_mutation, &EvolutionConfig::mutation_prob);
    take(o.op_hlx, &EvolutionConfig::high_level_crossover_fraction);
    take(o.op_seed, &EvolutionConfig::seed);
    take(o.op_holdout, &EvolutionConfig::holdout_fraction);
    if (o.op_function_set->count() > 0)
        config.function_set = FunctionSet::from_string(o.function_set);
    if (o.op_execution->count() > 0)
        config.execution =
            o.execution == "serial" ? ExecPolicy::serial : ExecPolicy::parallel;
    config.validate();
    if (o.runs < 1)
        throw ConfigError("--runs must be >= 1");

    DatasetSpec spec;
    spec.target_column = o.target;
    spec.id_column = o.id_column;
    spec.feature_columns = o.features;
    spec.direction = direction_from(o.direction);
    Dataset data = load_dataset_csv(o.data_path, spec);

    if (config.holdout_fraction == 0.0)
        std::fprintf(stderr,
                     "warning: holdout_fraction is 0; model selection and the "
                     "r2_holdout column reuse the training data\n");

    fs::create_directories(o.out_dir);
    SelectionPolicy policy =
        o.policy == "knee" ? SelectionPolicy::knee : SelectionPolicy::best_r2;

    std::vector<ArchiveEntry> entries;
    std::vector<GenerationStats> history;
    const Individual* chosen = nullptr;
    ParetoArchive merged;
    EvolveResult single;

    if (o.runs == 1) {
        single = evolve(data, config);
        std::printf("run 1/1: archive %zu models, best fitness %s\n",
                    single.archive.members.size(),
                    short_num(single.archive.best_fitness()).c_str());
        entries = annotate_archive(single.archive, single.train, single.holdout);
        history = single.archive.history;
        const Dataset& validation =
            config.holdout_fraction > 0.0 ? single.holdout : single.train;
        chosen = &select_final(single.archive, validation, policy);
        if (config.holdout_fraction > 0.0)
            std::printf("holdout R^2 of selected model: %s\n",
                        short_num(plain_r2(chosen->model, single.holdout)).c_str());
    } else {
        for (std::size_t k = 0; k < o.runs; ++k) {
            EvolutionConfig run_config = config;
            run_config.seed = config.seed + k;
            EvolveResult result = evolve(data, run_config);
            for (const Individual& member : result.archive.members)
                merged.insert(member);
            history.insert(history.end(), result.archive.history.begin(),
                           result.archive.history.end());
            std::printf("run %zu/%zu (seed %llu): archive %zu models, best fitness %s\n",
                        k + 1, o.runs,
                        static_cast<unsigned long long>(run_config.seed),
                        result.archive.members.size(),
                        short_num(result.archive.best_fitness()).c_str());
        }
        merged.sort_members();
        // fitness comes from each run's own training split, so r2_train is its
        // complement; r2_holdout is scored on the full table as a common yardstick
        entries.reserve(merged.members.size());
        for (const Individual& member : merged.members) {
            ArchiveEntry entry;
            entry.model = member.model;
            entry.objectives = member.objectives;
            entry.pareto_rank = member.pareto_rank;
            entry.r2_train = 1.0 - member.objectives.fitness;
            entry.r2_holdout = plain_r2(member.model, data);
            entries.push_back(std::move(entry));
        }
        chosen = &select_final(merged, data, policy);
    }

    const std::string archive_path = (fs::path(o.out_dir) / "archive.json").string();
    const std::string front_path = (fs::path(o.out_dir) / "front.csv").string();
    const std::string history_path = (fs::path(o.out_dir) / "history.csv").string();
    const std::string model_path =
        (fs::path(o.out_dir) / "selected_model.json").string();
    save_archive(entries, archive_path);
    write_front_csv(entries, front_path);
    write_history_csv(history, history_path);
    save_model(chosen->model, model_path, &chosen->objectives);

    std::printf("selected model (%s): fitness %s, complexity %lld, train R^2 %s\n",
                o.policy.c_str(), short_num(chosen->objectives.fitness).c_str(),
                chosen->objectives.complexity,
                short_num(1.0 - chosen->objectives.fitness).c_str());
    std::printf("%s\n", format_linear(chosen->model).c_str());
    std::printf("wrote %s, %s, %s, %s\n", archive_path.c_str(), front_path.c_str(),
                history_path.c_str(), model_path.c_str());
}

// ---- predict --------------------------------------------------------------

struct PredictOpts {
    std::string model;
    std::string data_path;
    std::string id_column;
    std::string out = "predictions.csv";
};

MultiGeneModel resolve_model(const std::string& name) {
    constexpr std::string_view prefix = "builtin:";
    if (name.rfind(prefix, 0) == 0) {
        auto id = builtin_id_from_name(name.substr(prefix.size()));
        if (!id)
            throw ConfigError("unknown builtin model '" + name +
                              "' (known: builtin:mfmogp1 .. builtin:mfmogp4)");
        return builtin_model(*id);
    }
    return load_model(name);
}

void run_predict(const PredictOpts& o) {
    MultiGeneModel model = resolve_model(o.model);
    DatasetSpec spec;
    spec.id_column = o.id_column;
    Dataset data = load_dataset_csv(o.data_path, spec);
    std::vector<double> predictions = predict(model, data);
    write_predictions_csv(data.ids, predictions, o.out);
    std::printf("wrote %s (%zu predictions)\n", o.out.c_str(), predictions.size());
}

// ---- eval -----------------------------------------------------------------

struct EvalOpts {
    std::string predictions_path;
    std::string subjective_path;
    std::string target;
    std::string id_column = "id";
    std::string out;
    bool no_logistic = false;
};

void run_eval(const EvalOpts& o) {
    std::vector<std::string> ids;
    std::vector<double> predictions;
    read_predictions_csv(o.predictions_path, ids, predictions);

    CsvTable subjective_table = read_csv(o.subjective_path);
    std::size_t id_col = subjective_table.column_index(o.id_column);
    std::size_t target_col = subjective_table.column_index(o.target);
    std::map<std::string, double> by_id;
    for (std::size_t r = 0; r < subjective_table.rows.size(); ++r) {
        const std::string& id = subjective_table.rows[r][id_col];
        if (!by_id.emplace(id, subjective_table.number_at(r, target_col)).second)
            throw DataError(o.subjective_path + ": duplicate id '" + id + "'");
    }
    std::vector<double> subjective;
    subjective.reserve(ids.size());
    for (const std::string& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw DataError("id '" + id + "' from " + o.predictions_path +
                            " has no row in " + o.subjective_path);
        subjective.push_back(it->second);
    }

    EvaluationReport report = evaluate_report(predictions, subjective, !o.no_logistic);
    std::printf("srcc = %.6f\n", report.srcc);
    std::printf("krcc = %.6f\n", report.krcc);
    std::printf("pcc  = %.6f%s\n", report.pcc,
                report.logistic_used ? "  (after logistic mapping)" : "  (raw)");
    std::printf("rmse = %.6f%s\n", report.rmse,
                report.logistic_used ? "  (after logistic mapping)" : "  (raw)");
    if (!o.out.empty()) {
        save_report(report, o.out);
        std::printf("wrote %s\n", o.out.c_str());
    }
}

// ---- front ----------------------------------------------------------------

struct FrontOpts {
    std::string archive_path;
    std::string out = "front.csv";
};

void run_front(const FrontOpts& o) {
    std::vector<ArchiveEntry> entries = load_archive(o.archive_path);
    write_front_csv(entries, o.out);
    std::printf("wrote %s (%zu models)\n", o.out.c_str(), entries.size());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multigene symbolic regression for fusing quality measure scores"};
    app.require_subcommand(1);

    EvolveOpts ev;
    CLI::App* evolve_cmd = app.add_subcommand(
        "evolve", "evolve a Pareto front of fusion models from a score table");
    evolve_cmd->add_option("--data", ev.data_path, "training CSV")->required();
    evolve_cmd->add_option("--target", ev.target, "subjective score column")
        ->required();
    evolve_cmd->add_option("--id", ev.id_column, "sample id column");
    evolve_cmd
        ->add_option("--features", ev.features,
                     "feature columns (default: all but target and id)")
        ->delimiter(',');
    evolve_cmd
        ->add_option("--target-direction", ev.direction,
                     "higher = scores grow with quality, lower = DMOS-style")
        ->check(CLI::IsMember({"higher", "lower"}));
    evolve_cmd->add_option("--config", ev.config_path, "key=value config file");
    evolve_cmd->add_option("--out-dir", ev.out_dir, "output directory");
    evolve_cmd->add_option("--runs", ev.runs,
                           "independent runs with consecutive seeds, fronts merged");
    evolve_cmd
        ->add_option("--policy", ev.policy, "final model pick: best_r2 or knee")
        ->check(CLI::IsMember({"best_r2", "knee"}));
    ev.op_population = evolve_cmd->add_option("--population-size",
                                              ev.flags.population_size, "");
    ev.op_generations =
        evolve_cmd->add_option("--generations", ev.flags.generations, "");
    ev.op_gmax =
        evolve_cmd->add_option("--gmax", ev.flags.gmax, "max genes per model");
    ev.op_dmax = evolve_cmd->add_option("--dmax", ev.flags.dmax, "max tree depth");
    ev.op_tournament =
        evolve_cmd->add_option("--tournament-size", ev.flags.tournament_size, "");
    ev.op_elite =
        evolve_cmd->add_option("--elite-fraction", ev.flags.elite_fraction, "");
    ev.op_crossover =
        evolve_cmd->add_option("--crossover-prob", ev.flags.crossover_prob, "");
    ev.op_mutation =
        evolve_cmd->add_option("--mutation-prob", ev.flags.mutation_prob, "");
    ev.op_hlx = evolve_cmd->add_option("--high-level-crossover-fraction",
                                       ev.flags.high_level_crossover_fraction, "");
    ev.op_seed = evolve_cmd->add_option("--seed", ev.flags.seed, "");
    ev.op_holdout =
        evolve_cmd->add_option("--holdout-fraction", ev.flags.holdout_fraction,
                               "fraction of rows held out of the fit");
    ev.op_function_set = evolve_cmd->add_option(
        "--function-set", ev.function_set, "comma list out of + - * /");
    ev.op_execution =
        evolve_cmd->add_option("--execution", ev.execution, "serial or parallel")
            ->check(CLI::IsMember({"serial", "parallel"}));
    evolve_cmd->callback([&] { run_evolve(ev); });

    PredictOpts pr;
    CLI::App* predict_cmd =
        app.add_subcommand("predict", "apply a saved or builtin model to a table");
    predict_cmd
        ->add_option("--model", pr.model,
                     "model JSON path or builtin:mfmogp1 .. builtin:mfmogp4")
        ->required();
    predict_cmd->add_option("--data", pr.data_path, "feature CSV")->required();
    predict_cmd->add_option("--id", pr.id_column, "sample id column");
    predict_cmd->add_option("--out", pr.out, "output CSV");
    predict_cmd->callback([&] { run_predict(pr); });

    EvalOpts evl;
    CLI::App* eval_cmd = app.add_subcommand(
        "eval", "score predictions against subjective values (srcc/krcc/pcc/rmse)");
    eval_cmd->add_option("--predictions", evl.predictions_path, "id,prediction CSV")
        ->required();
    eval_cmd->add_option("--subjective", evl.subjective_path, "CSV with true scores")
        ->required();
    eval_cmd->add_option("--target", evl.target, "subjective score column")
        ->required();
    eval_cmd->add_option("--id", evl.id_column, "id column in the subjective CSV");
    eval_cmd->add_flag("--no-logistic", evl.no_logistic,
                       "compute pcc/rmse on raw scores instead of the "
                       "five-parameter logistic mapping");
    eval_cmd->add_option("--out", evl.out, "write the report as JSON");
    eval_cmd->callback([&] { run_eval(evl); });

    FrontOpts fr;
    CLI::App* front_cmd =
        app.add_subcommand("front", "regenerate front.csv from an archive.json");
    front_cmd->add_option("--archive", fr.archive_path, "archive JSON")->required();
    front_cmd->add_option("--out", fr.out, "output CSV");
    front_cmd->callback([&] { run_front(fr); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is a config problem
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
