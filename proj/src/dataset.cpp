#include "mfgp/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "mfgp/errors.hpp"

namespace mfgp {

void Dataset::validate() const {
    if (columns.size() != schema.size())
        throw DataError("dataset has " + std::to_string(columns.size()) +
                        " columns but " + std::to_string(schema.size()) +
                        " schema names");
    std::unordered_set<std::string> seen;
    for (const std::string& name : schema)
        if (!seen.insert(name).second)
            throw DataError("duplicate feature name '" + name + "'");
    for (std::size_t f = 0; f < columns.size(); ++f) {
        if (columns[f].size() != target.size())
            throw DataError("column '" + schema[f] + "' has " +
                            std::to_string(columns[f].size()) + " rows, target has " +
                            std::to_string(target.size()));
        for (double v : columns[f])
            if (!std::isfinite(v))
                throw DataError("non-finite value in column '" + schema[f] + "'");
    }
    for (double v : target)
        if (!std::isfinite(v))
            throw DataError("non-finite value in target column");
    if (!ids.empty() && ids.size() != target.size())
        throw DataError("id column has " + std::to_string(ids.size()) +
                        " rows, target has " + std::to_string(target.size()));
}

std::vector<double> Dataset::fitting_target() const {
    std::vector<double> y = target;
    if (direction == TargetDirection::lower_better)
        for (double& v : y)
            v = -v;
    return y;
}

std::vector<const double*> Dataset::column_view() const {
    std::vector<const double*> view(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f)
        view[f] = columns[f].data();
    return view;
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t f = 0; f < schema.size(); ++f)
        if (schema[f] == name)
            return f;
    throw SchemaError("no feature column named '" + name + "'");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.schema = schema;
    out.direction = direction;
    out.columns.resize(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        out.columns[f].reserve(rows.size());
        for (std::size_t r : rows)
            out.columns[f].push_back(columns[f].at(r));
    }
    out.target.reserve(rows.size());
    for (std::size_t r : rows)
        out.target.push_back(target.at(r));
    if (!ids.empty()) {
        out.ids.reserve(rows.size());
        for (std::size_t r : rows)
            out.ids.push_back(ids.at(r));
    }
    return out;
}

} // namespace mfgp
