#include "mfgp/multigene.hpp"

#include <cmath>
#include <limits>

#define EIGEN_DONT_PARALLELIZE
#include <Eigen/Dense>

#include "mfgp/errors.hpp"

namespace mfgp {

double r_squared(std::span<const double> pred, std::span<const double> actual) {
    if (pred.size() != actual.size())
        throw DataError("r_squared: length mismatch (" + std::to_string(pred.size()) +
                        " vs " + std::to_string(actual.size()) + ")");
    if (actual.size() < 2)
        throw DataError("r_squared: need at least 2 samples");
    double mean = 0.0;
    for (double v : actual)
        mean += v;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        double r = pred[i] - actual[i];
        double d = actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0)
        throw DataError("r_squared: target has zero variance");
    return 1.0 - ss_res / ss_tot;
}

MultiGeneModel fit_weights(std::vector<GeneTree> genes, const Dataset& data) {
    if (genes.empty())
        throw DataError("fit_weights: empty gene list");
    const std::size_t m = data.sample_count();
    if (m == 0)
        throw DataError("fit_weights: dataset has zero samples");
    const std::size_t n = genes.size();

    std::vector<const double*> columns = data.column_view();
    Eigen::MatrixXd design(m, n + 1);
    design.col(0).setOnes();
    std::vector<double> buffer(m);
    for (std::size_t g = 0; g < n; ++g) {
        eval_tree(genes[g], columns, m, buffer.data());
        for (std::size_t s = 0; s < m; ++s)
            design(s, g + 1) = buffer[s];
    }

    std::vector<double> y = data.fitting_target();
    Eigen::Map<const Eigen::VectorXd> rhs(y.data(), static_cast<Eigen::Index>(m));

    // complete orthogonal decomposition: column-pivoted QR, and the
    // minimum-norm solution when the design is rank deficient
    Eigen::VectorXd coef =
        design.completeOrthogonalDecomposition().solve(rhs);

    MultiGeneModel model;
    model.genes = std::move(genes);
    model.schema = data.schema;
    model.bias = coef(0);
    model.weights.resize(n);
    for (std::size_t g = 0; g < n; ++g)
        model.weights[g] = coef(g + 1);
    return model;
}

std::vector<double> predict_columns(const MultiGeneModel& model,
                                    std::span<const double* const> columns,
                                    std::size_t n_samples) {
    if (model.weights.size() != model.genes.size())
        throw DataError("model has " + std::to_string(model.genes.size()) +
                        " genes but " + std::to_string(model.weights.size()) +
                        " weights");
    std::vector<double> out(n_samples, model.bias);
    std::vector<double> buffer(n_samples);
    for (std::size_t g = 0; g < model.genes.size(); ++g) {
        eval_tree(model.genes[g], columns, n_samples, buffer.data());
        const double w = model.weights[g];
        for (std::size_t s = 0; s < n_samples; ++s)
            out[s] += w * buffer[s];
    }
    return out;
}

std::vector<double> predict(const MultiGeneModel& model, const Dataset& data) {
    std::vector<const double*> columns(model.schema.size());
    std::string missing;
    for (std::size_t f = 0; f < model.schema.size(); ++f) {
        bool found = false;
        for (std::size_t c = 0; c < data.schema.size(); ++c) {
            if (data.schema[c] == model.schema[f]) {
                columns[f] = data.columns[c].data();
                found = true;
                break;
            }
        }
        if (!found) {
            if (!missing.empty())
                missing += ", ";
            missing += model.schema[f];
        }
    }
    if (!missing.empty())
        throw SchemaError("data is missing model columns: " + missing);
    return predict_columns(model, columns, data.sample_count());
}

long long model_complexity(const MultiGeneModel& model) {
    long long total = 0;
    for (const GeneTree& gene : model.genes)
        total += static_cast<long long>(tree_metrics(gene).expressional_complexity);
    return total;
}

ObjectivePair model_objectives(const MultiGeneModel& model, const Dataset& data) {
    ObjectivePair obj;
    obj.complexity = model_complexity(model);
    std::vector<double> pred = predict(model, data);
    bool finite = true;
    for (double v : pred)
        if (!std::isfinite(v)) {
            finite = false;
            break;
        }
    if (!finite) {
        // poisoned by non-finite gene output (possible only with * or /)
        obj.fitness = std::numeric_limits<double>::infinity();
        return obj;
    }
    std::vector<double> y = data.fitting_target();
    double r2 = r_squared(pred, y);
    obj.fitness = std::isfinite(r2) ? 1.0 - r2
                                    : std::numeric_limits<double>::infinity();
    return obj;
}

} // namespace mfgp
