#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mfgp {

enum class TargetDirection {
    higher_better, // MOS-style subjective scores
    lower_better,  // DMOS-style subjective scores
};

/// A samples-by-features score table with one subjective-score column.
/// Stored column-major: columns[f][s] is feature f of sample s.
struct Dataset {
    std::vector<std::string> schema;          // feature names, unique
    std::vector<std::vector<double>> columns; // schema.size() columns
    std::vector<double> target;               // subjective scores, as loaded
    TargetDirection direction = TargetDirection::higher_better;
    std::vector<std::string> ids;             // optional per-sample labels

    std::size_t feature_count() const { return schema.size(); }
    std::size_t sample_count() const { return target.size(); }

    /// Throws DataError when sizes disagree, names repeat, or values are not finite.
    void validate() const;

    /// Target values oriented so that larger always means better; lower-is-better
    /// targets are negated. All fitting and fitness computation uses this view.
    std::vector<double> fitting_target() const;

    /// Pointers to the feature columns, one per schema entry.
    std::vector<const double*> column_view() const;

    /// Index of a named feature, or throws SchemaError.
    std::size_t column_index(const std::string& name) const;

    /// Copies the given sample rows (in the given order) into a new dataset.
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

} // namespace mfgp
