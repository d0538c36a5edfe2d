#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/dataset.hpp"
#include "mfgp/evolution.hpp"
#include "mfgp/multigene.hpp"
#include "mfgp/quality.hpp"

namespace mfgp {

/// %.17g — enough digits for an exact double round-trip in the CSV outputs
std::string fmt_double(double v);

/// Plain comma-separated table, no quoting. Lines may end in \r\n. Every row
/// must have exactly as many fields as the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column, or DataError naming the file and column.
    std::size_t column_index(const std::string& name) const;
    /// Numeric cell value; DataError cites the 1-based data row and column name.
    double number_at(std::size_t row, std::size_t col) const;

    std::string origin; // path, used in error messages
};

CsvTable parse_csv(std::string_view text, const std::string& origin);
CsvTable read_csv(const std::string& path);

struct DatasetSpec {
    std::string target_column;                // "" = feature-only table, target 0
    std::string id_column;                    // "" = synthesize row numbers
    std::vector<std::string> feature_columns; // empty = all other columns
    TargetDirection direction = TargetDirection::higher_better;
};

Dataset load_dataset_csv(const std::string& path, const DatasetSpec& spec);

// ---- model files ----------------------------------------------------------

/// Pass `objectives` to record fitness/complexity alongside the model.
std::string model_to_json(const MultiGeneModel& model,
                          const ObjectivePair* objectives = nullptr);
MultiGeneModel model_from_json(const std::string& text, const std::string& origin);
void save_model(const MultiGeneModel& model, const std::string& path,
                const ObjectivePair* objectives = nullptr);
MultiGeneModel load_model(const std::string& path);

// ---- archive files --------------------------------------------------------

/// One archived model plus the numbers reported alongside it.
struct ArchiveEntry {
    MultiGeneModel model;
    ObjectivePair objectives;
    int pareto_rank = 1;
    double r2_train = 0.0;
    double r2_holdout = 0.0;
};

std::vector<ArchiveEntry> annotate_archive(const ParetoArchive& archive,
                                           const Dataset& train,
                                           const Dataset& holdout);

void save_archive(std::span<const ArchiveEntry> entries, const std::string& path);
std::vector<ArchiveEntry> load_archive(const std::string& path);

/// complexity,fitness,r2_train,r2_holdout rows in ascending complexity.
void write_front_csv(std::span<const ArchiveEntry> entries, const std::string& path);

void write_history_csv(std::span<const GenerationStats> history,
                       const std::string& path);

void write_predictions_csv(std::span<const std::string> ids,
                           std::span<const double> predictions,
                           const std::string& path);

/// Reads an `id,prediction` file produced by write_predictions_csv.
void read_predictions_csv(const std::string& path, std::vector<std::string>& ids,
                          std::vector<double>& predictions);

void save_report(const EvaluationReport& report, const std::string& path);

// ---- config files ---------------------------------------------------------

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies config-file keys onto an EvolutionConfig. Unknown keys and
/// malformed values raise ConfigError naming the key.
void apply_config(EvolutionConfig& config,
                  const std::map<std::string, std::string>& entries);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace mfgp
