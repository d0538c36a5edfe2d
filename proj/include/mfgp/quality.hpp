#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mfgp {

// average ranks, 1-based; tied values share the mean of their positions
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> a, std::span<const double> b);

// Spearman: Pearson correlation of the average ranks
double srcc(std::span<const double> a, std::span<const double> b);

// Kendall tau-b via merge-sort inversion counting, O(n log n)
double krcc(std::span<const double> a, std::span<const double> b);

double rmse(std::span<const double> predicted, std::span<const double> actual);

// five-parameter logistic regression of subjective scores on model scores:
//   q(x) = b1*(1/2 - 1/(1+exp(b2*(x-b3)))) + b4*x + b5
struct LogisticFit {
    std::array<double, 5> beta{};
    double sse = 0.0;
    bool converged = false;
};

LogisticFit logistic_fit(std::span<const double> objective,
                         std::span<const double> subjective);

std::vector<double> logistic_apply(const std::array<double, 5>& beta,
                                   std::span<const double> objective);

struct EvaluationReport {
    double srcc = 0.0;
    double krcc = 0.0;
    double pcc = 0.0;
    double rmse = 0.0;
    bool logistic_used = false;
    std::array<double, 5> beta{}; // meaningful only when logistic_used
};

// srcc/krcc on the raw scores; pcc/rmse after the logistic mapping when
// use_logistic is set, otherwise on the raw scores as well
EvaluationReport evaluate_report(std::span<const double> objective,
                                 std::span<const double> subjective,
                                 bool use_logistic);

} // namespace mfgp
