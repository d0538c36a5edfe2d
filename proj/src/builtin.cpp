#include "mfgp/builtin.hpp"

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>

#include "mfgp/errors.hpp"

namespace mfgp {

const std::array<std::string, 16>& canonical_measure_names() {
    static const std::array<std::string, 16> names = {
        "VSI",  "FSIM",  "FSIMC", "GSM",   "IFC", "IWSSIM", "MAD", "MSSIM",
        "NQM",  "PSNR",  "RFSIM", "SRSIM", "VIF", "IFS",    "SFF", "SSIM"};
    return names;
}

const char* builtin_name(BuiltinModelId id) {
    switch (id) {
    case BuiltinModelId::mfmogp1: return "mfmogp1";
    case BuiltinModelId::mfmogp2: return "mfmogp2";
    case BuiltinModelId::mfmogp3: return "mfmogp3";
    case BuiltinModelId::mfmogp4: return "mfmogp4";
    }
    throw ConfigError("unknown builtin model id");
}

std::optional<BuiltinModelId> builtin_id_from_name(std::string_view name) {
    if (name == "mfmogp1") return BuiltinModelId::mfmogp1;
    if (name == "mfmogp2") return BuiltinModelId::mfmogp2;
    if (name == "mfmogp3") return BuiltinModelId::mfmogp3;
    if (name == "mfmogp4") return BuiltinModelId::mfmogp4;
    return std::nullopt;
}

namespace {

enum Measure : std::int32_t {
    VSI, FSIM, FSIMC, GSM, IFC, IWSSIM, MAD, MSSIM,
    NQM, PSNR, RFSIM, SRSIM, VIF, IFS, SFF, SSIM
};

struct Term {
    double weight;
    Measure measure;
};

MultiGeneModel from_terms(double bias, std::initializer_list<Term> terms) {
    MultiGeneModel model;
    model.bias = bias;
    model.schema.assign(canonical_measure_names().begin(),
                        canonical_measure_names().end());
    for (const Term& term : terms) {
        GeneTree gene;
        gene.nodes.push_back(ExprNode::leaf(term.measure));
        model.genes.push_back(std::move(gene));
        model.weights.push_back(term.weight);
    }
    return model;
}

} // namespace

MultiGeneModel builtin_model(BuiltinModelId id) {
    switch (id) {
    case BuiltinModelId::mfmogp1:
        // high-accuracy pick; note the paired coefficients (FSIM/VIF share
        // -46.77 and IFC/NQM share 11.27) — that is how the model is defined
        return from_terms(-114.9, {{207.4, GSM},
                                   {-46.77, FSIM},
                                   {11.27, IFC},
                                   {24.24, IWSSIM},
                                   {68.18, MAD},
                                   {11.27, NQM},
                                   {-46.77, VIF},
                                   {-35.51, IFS}});
    case BuiltinModelId::mfmogp2:
        return from_terms(-0.5207, {{2.012, GSM},
                                    {-1.112, VSI},
                                    {0.4993, MAD},
                                    {0.6708, MSSIM},
                                    {-0.1912, RFSIM},
                                    {-0.4408, SRSIM},
                                    {-0.2299, VIF},
                                    {-0.4408, IFS},
                                    {0.2496, SFF}});
    case BuiltinModelId::mfmogp3:
        return from_terms(-11.37, {{10.31, VSI},
                                   {0.6498, IWSSIM},
                                   {-1.958, MAD},
                                   {-0.6498, NQM},
                                   {1.958, PSNR},
                                   {0.6589, RFSIM},
                                   {3.917, SRSIM},
                                   {-3.848, SSIM},
                                   {1.958, VIF},
                                   {3.848, IFS}});
    case BuiltinModelId::mfmogp4:
        return from_terms(-13.96, {{15.28, VSI},
                                   {-14.09, FSIM},
                                   {14.09, FSIMC},
                                   {3.754, GSM},
                                   {-2.565, MAD},
                                   {-3.754, MSSIM},
                                   {-1.189, PSNR},
                                   {1.189, VIF},
                                   {3.754, IFS}});
    }
    throw ConfigError("unknown builtin model id");
}

std::array<double, 16> MeasureRow::as_array() const {
    return {vsi, fsim, fsimc, gsm, ifc,  iwssim, mad, mssim,
            nqm, psnr, rfsim, srsim, vif, ifs,    sff, ssim};
}

double builtin_predict(BuiltinModelId id, const MeasureRow& row) {
    std::array<double, 16> values = row.as_array();
    std::array<const double*, 16> columns;
    for (std::size_t i = 0; i < 16; ++i)
        columns[i] = &values[i];
    std::vector<double> out =
        predict_columns(builtin_model(id), std::span<const double* const>(columns), 1);
    return out[0];
}

std::vector<double> builtin_predict(BuiltinModelId id, const Dataset& data) {
    return predict(builtin_model(id), data);
}

} // namespace mfgp
