#pragma once

#include <span>
#include <string>
#include <vector>

#include "mfgp/dataset.hpp"
#include "mfgp/expr.hpp"

namespace mfgp {

/// The linear fusion model: prediction = bias + sum_i weights[i] * gene_i(X).
/// Weights come from an ordinary least-squares fit, never from evolution.
struct MultiGeneModel {
    std::vector<GeneTree> genes;
    std::vector<double> weights; // one per gene
    double bias = 0.0;
    std::vector<std::string> schema;

    std::size_t gene_count() const { return genes.size(); }

    bool same_structure(const MultiGeneModel& other) const {
        return genes == other.genes && weights == other.weights &&
               bias == other.bias && schema == other.schema;
    }
};

/// The two minimized objectives attached to a model. Fitness is 1 - R^2 on the
/// training data; complexity is the summed expressional complexity of the
/// genes (bias and weights excluded). A model whose gene outputs go non-finite
/// gets fitness = +inf and never enters any Pareto archive.
struct ObjectivePair {
    double fitness = 0.0;
    long long complexity = 0;

    bool operator==(const ObjectivePair& other) const {
        return fitness == other.fitness && complexity == other.complexity;
    }
};

/// Coefficient of determination: 1 - SSres/SStot. Throws DataError when
/// `actual` has zero variance or lengths disagree or are < 2.
double r_squared(std::span<const double> pred, std::span<const double> actual);

/// Fits the weights and bias of the linear gene mix by least squares against
/// data's fitting target. Rank-deficient designs (duplicate genes, constant
/// gene outputs) resolve to the minimum-norm solution.
MultiGeneModel fit_weights(std::vector<GeneTree> genes, const Dataset& data);

/// Model output per sample. Feature columns are matched to the model schema by
/// name; missing columns raise SchemaError listing every absent name.
std::vector<double> predict(const MultiGeneModel& model, const Dataset& data);

/// Low-level variant for data already in model-schema column order.
std::vector<double> predict_columns(const MultiGeneModel& model,
                                    std::span<const double* const> columns,
                                    std::size_t n_samples);

long long model_complexity(const MultiGeneModel& model);

ObjectivePair model_objectives(const MultiGeneModel& model, const Dataset& data);

} // namespace mfgp
