#include "mfgp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "mfgp/errors.hpp"

namespace mfgp {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw DataError("write failed for " + path);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_number(std::string_view text, const std::string& context) {
    std::string_view t = trim(text);
    if (t.empty())
        throw DataError(context + ": missing value");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw DataError(context + ": cannot parse '" + std::string(text) +
                        "' as a number");
    return value;
}

double config_number(std::string_view text, const std::string& context) {
    try {
        return parse_number(text, context);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

unsigned long long parse_uint(std::string_view text, const std::string& context) {
    std::string_view t = trim(text);
    unsigned long long value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError(context + ": cannot parse '" + std::string(text) +
                          "' as a non-negative integer");
    return value;
}

} // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw DataError(origin + ": no column named '" + name + "'");
}

double CsvTable::number_at(std::size_t row, std::size_t col) const {
    return parse_number(rows[row][col], origin + " row " + std::to_string(row + 1) +
                                            ", column '" + columns[col] + "'");
}

CsvTable parse_csv(std::string_view text, const std::string& origin) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& line : lines)
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
    while (!lines.empty() && lines.back().empty())
        lines.pop_back();
    if (lines.empty())
        throw DataError(origin + ": empty file");

    CsvTable table;
    table.origin = origin;
    table.columns = split_fields(lines[0]);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::vector<std::string> fields = split_fields(lines[r]);
        if (fields.size() != table.columns.size())
            throw DataError(origin + " row " + std::to_string(r) + ": expected " +
                            std::to_string(table.columns.size()) + " fields, got " +
                            std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    return parse_csv(read_text_file(path), path);
}

Dataset load_dataset_csv(const std::string& path, const DatasetSpec& spec) {
    CsvTable table = read_csv(path);
    std::size_t target_col = table.columns.size(); // sentinel: none
    if (!spec.target_column.empty())
        target_col = table.column_index(spec.target_column);
    std::size_t id_col = table.columns.size();
    if (!spec.id_column.empty())
        id_col = table.column_index(spec.id_column);

    std::vector<std::size_t> feature_cols;
    if (spec.feature_columns.empty()) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            if (c != target_col && c != id_col)
                feature_cols.push_back(c);
    } else {
        for (const std::string& name : spec.feature_columns) {
            std::size_t c = table.column_index(name);
            if (c == target_col && target_col < table.columns.size())
                throw ConfigError(path + ": column '" + name +
                                  "' is both a feature and the target");
            feature_cols.push_back(c);
        }
    }
    if (feature_cols.empty())
        throw DataError(path + ": no feature columns left");

    Dataset data;
    data.direction = spec.direction;
    for (std::size_t c : feature_cols)
        data.schema.push_back(table.columns[c]);
    data.columns.assign(feature_cols.size(), {});
    const std::size_t n = table.rows.size();
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
        data.columns[f].reserve(n);
        for (std::size_t r = 0; r < n; ++r)
            data.columns[f].push_back(table.number_at(r, feature_cols[f]));
    }
    if (target_col < table.columns.size()) {
        data.target.reserve(n);
        for (std::size_t r = 0; r < n; ++r)
            data.target.push_back(table.number_at(r, target_col));
    } else {
        data.target.assign(n, 0.0); // prediction-only table, no subjective column
    }
    data.ids.reserve(n);
    for (std::size_t r = 0; r < n; ++r)
        data.ids.push_back(id_col < table.columns.size() ? table.rows[r][id_col]
                                                         : std::to_string(r + 1));
    data.validate();
    return data;
}

// ---- model files ----------------------------------------------------------

namespace {

ordered_json model_fields_to_json(const MultiGeneModel& model,
                                  const ObjectivePair* objectives) {
    ordered_json j;
    j["schema"] = model.schema;
    ordered_json genes = ordered_json::array();
    for (const GeneTree& gene : model.genes)
        genes.push_back(print_sexpr(gene));
    j["genes"] = std::move(genes);
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    if (objectives) {
        j["objectives"] = {{"fitness", objectives->fitness},
                           {"complexity", objectives->complexity}};
    }
    return j;
}

const ordered_json& require_field(const ordered_json& j, const char* field,
                                  const std::string& origin) {
    auto it = j.find(field);
    if (it == j.end())
        throw DataError(origin + ": missing field '" + field + "'");
    return *it;
}

double json_double(const ordered_json& j, const std::string& context) {
    if (j.is_null()) // non-finite values serialize as null
        return -std::numeric_limits<double>::infinity();
    if (!j.is_number())
        throw DataError(context + ": expected a number");
    return j.get<double>();
}

MultiGeneModel model_fields_from_json(const ordered_json& j,
                                      const std::string& origin) {
    if (!j.is_object())
        throw DataError(origin + ": expected a JSON object");
    MultiGeneModel model;

    const ordered_json& schema = require_field(j, "schema", origin);
    if (!schema.is_array())
        throw DataError(origin + ": 'schema' must be an array of names");
    for (const auto& name : schema) {
        if (!name.is_string())
            throw DataError(origin + ": 'schema' must be an array of names");
        model.schema.push_back(name.get<std::string>());
    }

    const ordered_json& genes = require_field(j, "genes", origin);
    if (!genes.is_array())
        throw DataError(origin + ": 'genes' must be an array of expressions");
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!genes[i].is_string())
            throw DataError(origin + ": 'genes' must be an array of expressions");
        try {
            model.genes.push_back(parse_sexpr(genes[i].get<std::string>(), model.schema));
        } catch (const DataError& e) {
            throw DataError(origin + " gene " + std::to_string(i + 1) + ": " + e.what());
        }
    }

    const ordered_json& weights = require_field(j, "weights", origin);
    if (!weights.is_array())
        throw DataError(origin + ": 'weights' must be an array of numbers");
    for (std::size_t i = 0; i < weights.size(); ++i)
        model.weights.push_back(
            json_double(weights[i], origin + " weight " + std::to_string(i + 1)));
    if (model.weights.size() != model.genes.size())
        throw DataError(origin + ": " + std::to_string(model.genes.size()) +
                        " genes but " + std::to_string(model.weights.size()) +
                        " weights");

    model.bias = json_double(require_field(j, "bias", origin), origin + " bias");
    return model;
}

ordered_json parse_json(const std::string& text, const std::string& origin) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(origin + ": " + e.what());
    }
}

} // namespace

std::string model_to_json(const MultiGeneModel& model,
                          const ObjectivePair* objectives) {
    return model_fields_to_json(model, objectives).dump(2) + "\n";
}

MultiGeneModel model_from_json(const std::string& text, const std::string& origin) {
    return model_fields_from_json(parse_json(text, origin), origin);
}

void save_model(const MultiGeneModel& model, const std::string& path,
                const ObjectivePair* objectives) {
    write_text_file(path, model_to_json(model, objectives));
}

MultiGeneModel load_model(const std::string& path) {
    return model_from_json(read_text_file(path), path);
}

// ---- archive files --------------------------------------------------------

namespace {

double safe_r2(const MultiGeneModel& model, const Dataset& data) {
    std::vector<double> pred = predict(model, data);
    for (double v : pred)
        if (!std::isfinite(v))
            return -std::numeric_limits<double>::infinity();
    return r_squared(pred, data.fitting_target());
}

} // namespace

std::vector<ArchiveEntry> annotate_archive(const ParetoArchive& archive,
                                           const Dataset& train,
                                           const Dataset& holdout) {
    std::vector<ArchiveEntry> entries;
    entries.reserve(archive.members.size());
    for (const Individual& member : archive.members) {
        ArchiveEntry entry;
        entry.model = member.model;
        entry.objectives = member.objectives;
        entry.pareto_rank = member.pareto_rank;
        entry.r2_train = safe_r2(member.model, train);
        entry.r2_holdout = safe_r2(member.model, holdout);
        entries.push_back(std::move(entry));
    }
    return entries;
}

void save_archive(std::span<const ArchiveEntry> entries, const std::string& path) {
    ordered_json j = ordered_json::array();
    for (const ArchiveEntry& entry : entries) {
        ordered_json e = model_fields_to_json(entry.model, &entry.objectives);
        e["pareto_rank"] = entry.pareto_rank;
        e["r2_train"] = entry.r2_train;
        e["r2_holdout"] = entry.r2_holdout;
        j.push_back(std::move(e));
    }
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<ArchiveEntry> load_archive(const std::string& path) {
    ordered_json j = parse_json(read_text_file(path), path);
    if (!j.is_array())
        throw DataError(path + ": expected a JSON array of models");
    std::vector<ArchiveEntry> entries;
    entries.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string origin = path + " entry " + std::to_string(i + 1);
        const ordered_json& e = j[i];
        ArchiveEntry entry;
        entry.model = model_fields_from_json(e, origin);
        const ordered_json& obj = require_field(e, "objectives", origin);
        entry.objectives.fitness =
            json_double(require_field(obj, "fitness", origin), origin + " fitness");
        const ordered_json& complexity = require_field(obj, "complexity", origin);
        if (!complexity.is_number_integer())
            throw DataError(origin + ": 'complexity' must be an integer");
        entry.objectives.complexity = complexity.get<long long>();
        const ordered_json& rank = require_field(e, "pareto_rank", origin);
        if (!rank.is_number_integer())
            throw DataError(origin + ": 'pareto_rank' must be an integer");
        entry.pareto_rank = rank.get<int>();
        entry.r2_train =
            json_double(require_field(e, "r2_train", origin), origin + " r2_train");
        entry.r2_holdout = json_double(require_field(e, "r2_holdout", origin),
                                       origin + " r2_holdout");
        entries.push_back(std::move(entry));
    }
    return entries;
}

void write_front_csv(std::span<const ArchiveEntry> entries, const std::string& path) {
    std::vector<const ArchiveEntry*> sorted;
    sorted.reserve(entries.size());
    for (const ArchiveEntry& e : entries)
        sorted.push_back(&e);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ArchiveEntry* a, const ArchiveEntry* b) {
                         if (a->objectives.complexity != b->objectives.complexity)
                             return a->objectives.complexity < b->objectives.complexity;
                         return a->objectives.fitness < b->objectives.fitness;
                     });
    std::string out = "complexity,fitness,r2_train,r2_holdout\n";
    for (const ArchiveEntry* e : sorted) {
        out += std::to_string(e->objectives.complexity);
        out += ',';
        out += fmt_double(e->objectives.fitness);
        out += ',';
        out += fmt_double(e->r2_train);
        out += ',';
        out += fmt_double(e->r2_holdout);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_history_csv(std::span<const GenerationStats> history,
                       const std::string& path) {
    std::string out = "generation,best_fitness,front_size\n";
    for (const GenerationStats& s : history) {
        out += std::to_string(s.generation);
        out += ',';
        out += fmt_double(s.best_fitness);
        out += ',';
        out += std::to_string(s.front_size);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_predictions_csv(std::span<const std::string> ids,
                           std::span<const double> predictions,
                           const std::string& path) {
    if (ids.size() != predictions.size())
        throw DataError("predictions and ids differ in length");
    std::string out = "id,prediction\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i].find_first_of(",\n\r") != std::string::npos)
            throw DataError("id '" + ids[i] + "' contains a separator character");
        out += ids[i];
        out += ',';
        out += fmt_double(predictions[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void read_predictions_csv(const std::string& path, std::vector<std::string>& ids,
                          std::vector<double>& predictions) {
    CsvTable table = read_csv(path);
    std::size_t id_col = table.column_index("id");
    std::size_t pred_col = table.column_index("prediction");
    ids.clear();
    predictions.clear();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ids.push_back(table.rows[r][id_col]);
        predictions.push_back(table.number_at(r, pred_col));
    }
}

void save_report(const EvaluationReport& report, const std::string& path) {
    ordered_json j;
    j["srcc"] = report.srcc;
    j["krcc"] = report.krcc;
    j["pcc"] = report.pcc;
    j["rmse"] = report.rmse;
    j["logistic_used"] = report.logistic_used;
    if (report.logistic_used)
        j["beta"] = report.beta;
    write_text_file(path, j.dump(2) + "\n");
}

// ---- config files ---------------------------------------------------------

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what()); // a missing config file is a config problem
    }
    std::map<std::string, std::string> entries;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line(text.data() + start,
                              (nl == std::string::npos ? text.size() : nl) - start);
        ++line_no;
        start = (nl == std::string::npos) ? text.size() + 1 : nl + 1;

        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path + " line " + std::to_string(line_no) +
                              ": expected key=value");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(path + " line " + std::to_string(line_no) +
                              ": empty key");
        if (!entries.emplace(key, value).second)
            throw ConfigError(path + " line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
    }
    return entries;
}

void apply_config(EvolutionConfig& config,
                  const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        const std::string context = "config key '" + key + "'";
        if (key == "population_size") {
            config.population_size = parse_uint(value, context);
        } else if (key == "generations") {
            config.generations = parse_uint(value, context);
        } else if (key == "gmax") {
            config.gmax = parse_uint(value, context);
        } else if (key == "dmax") {
            config.dmax = parse_uint(value, context);
        } else if (key == "tournament_size") {
            config.tournament_size = parse_uint(value, context);
        } else if (key == "seed") {
            config.seed = parse_uint(value, context);
        } else if (key == "elite_fraction") {
            config.elite_fraction = config_number(value, context);
        } else if (key == "crossover_prob") {
            config.crossover_prob = config_number(value, context);
        } else if (key == "mutation_prob") {
            config.mutation_prob = config_number(value, context);
        } else if (key == "high_level_crossover_fraction") {
            config.high_level_crossover_fraction = config_number(value, context);
        } else if (key == "holdout_fraction") {
            config.holdout_fraction = config_number(value, context);
        } else if (key == "function_set") {
            config.function_set = FunctionSet::from_string(value);
        } else if (key == "execution") {
            if (value == "serial")
                config.execution = ExecPolicy::serial;
            else if (value == "parallel")
                config.execution = ExecPolicy::parallel;
            else
                throw ConfigError(context + ": expected 'serial' or 'parallel', got '" +
                                  value + "'");
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

} // namespace mfgp
