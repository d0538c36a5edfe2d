#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/dataset.hpp"
#include "mfgp/multigene.hpp"

namespace mfgp {

// the 16 full-reference measures the shipped fusion models consume, in
// canonical column order
const std::array<std::string, 16>& canonical_measure_names();

enum class BuiltinModelId { mfmogp1, mfmogp2, mfmogp3, mfmogp4 };

const char* builtin_name(BuiltinModelId id);
std::optional<BuiltinModelId> builtin_id_from_name(std::string_view name);

// shipped models as ordinary multigene models over the canonical schema, so
// prediction, serialization and evaluation all share one code path
MultiGeneModel builtin_model(BuiltinModelId id);

// one sample's measure scores, spelled out by name
struct MeasureRow {
    double vsi = 0.0;
    double fsim = 0.0;
    double fsimc = 0.0;
    double gsm = 0.0;
    double ifc = 0.0;
    double iwssim = 0.0;
    double mad = 0.0;
    double mssim = 0.0;
    double nqm = 0.0;
    double psnr = 0.0;
    double rfsim = 0.0;
    double srsim = 0.0;
    double vif = 0.0;
    double ifs = 0.0;
    double sff = 0.0;
    double ssim = 0.0;

    std::array<double, 16> as_array() const;
};

double builtin_predict(BuiltinModelId id, const MeasureRow& row);
std::vector<double> builtin_predict(BuiltinModelId id, const Dataset& data);

} // namespace mfgp
