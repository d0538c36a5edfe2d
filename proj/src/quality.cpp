#include "mfgp/quality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "mfgp/errors.hpp"

namespace mfgp {

namespace {

void require_pair(std::span<const double> a, std::span<const double> b,
                  const char* who) {
    if (a.size() != b.size())
        throw DataError(std::string(who) + ": size mismatch (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                        ")");
    if (a.size() < 2)
        throw DataError(std::string(who) + ": needs at least 2 samples");
}

} // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        // positions i..j (0-based) share the mean 1-based rank
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    require_pair(a, b, "pearson");
    const std::size_t n = a.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double da = a[i] - mean_a;
        double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw DataError("pearson: input has zero variance");
    return sab / std::sqrt(saa * sbb);
}

double srcc(std::span<const double> a, std::span<const double> b) {
    require_pair(a, b, "srcc");
    return pearson(average_ranks(a), average_ranks(b));
}

namespace {

long long tie_pairs(std::span<const double> sorted) {
    long long total = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i])
            ++j;
        long long run = static_cast<long long>(j - i + 1);
        total += run * (run - 1) / 2;
        i = j + 1;
    }
    return total;
}

// inversions between strictly-decreasing pairs, counted while merge sorting
long long count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                           std::size_t lo, std::size_t hi) {
    if (hi - lo < 2)
        return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    long long inversions = count_inversions(v, scratch, lo, mid) +
                           count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inversions += static_cast<long long>(mid - i);
            scratch[k++] = v[j++];
        } else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid)
        scratch[k++] = v[i++];
    while (j < hi)
        scratch[k++] = v[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return inversions;
}

} // namespace

double krcc(std::span<const double> a, std::span<const double> b) {
    require_pair(a, b, "krcc");
    const std::size_t n = a.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a[i] != a[j])
            return a[i] < a[j];
        return b[i] < b[j];
    });

    std::vector<double> a_sorted(n), b_by_a(n);
    for (std::size_t k = 0; k < n; ++k) {
        a_sorted[k] = a[order[k]];
        b_by_a[k] = b[order[k]];
    }

    long long ntie_a = tie_pairs(a_sorted);
    long long ntie_ab = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && a_sorted[j + 1] == a_sorted[i] &&
                   b_by_a[j + 1] == b_by_a[i])
                ++j;
            long long run = static_cast<long long>(j - i + 1);
            ntie_ab += run * (run - 1) / 2;
            i = j + 1;
        }
    }

    // within equal-a runs b is ascending, so inversions count exactly the
    // discordant pairs
    std::vector<double> scratch(n);
    std::vector<double> b_mut = b_by_a;
    long long discordant = count_inversions(b_mut, scratch, 0, n);

    std::vector<double> b_sorted = b_by_a;
    std::sort(b_sorted.begin(), b_sorted.end());
    long long ntie_b = tie_pairs(b_sorted);

    long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
    if (n0 == ntie_a || n0 == ntie_b)
        throw DataError("krcc: input has no untied pairs");
    long long con_minus_dis = n0 - ntie_a - ntie_b + ntie_ab - 2 * discordant;
    return static_cast<double>(con_minus_dis) /
           std::sqrt(static_cast<double>(n0 - ntie_a) *
                     static_cast<double>(n0 - ntie_b));
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size())
        throw DataError("rmse: size mismatch");
    if (predicted.empty())
        throw DataError("rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        double d = predicted[i] - actual[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predicted.size()));
}

namespace {

double logistic_value(const std::array<double, 5>& beta, double x) {
    double z = beta[1] * (x - beta[2]);
    double s = 0.5 - 1.0 / (1.0 + std::exp(z));
    return beta[0] * s + beta[3] * x + beta[4];
}

struct SimplexPoint {
    std::array<double, 5> x;
    double f;
};

// Nelder-Mead with the usual coefficients (reflect 1, expand 2, contract
// 0.5, shrink 0.5) and a per-coordinate 5% initial perturbation
SimplexPoint nelder_mead(const std::function<double(const std::array<double, 5>&)>& f,
                         const std::array<double, 5>& start, int max_iter,
                         double rel_tol, bool* converged) {
    constexpr std::size_t dim = 5;
    std::vector<SimplexPoint> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({start, f(start)});
    for (std::size_t i = 0; i < dim; ++i) {
        std::array<double, 5> p = start;
        p[i] = (p[i] != 0.0) ? 1.05 * p[i] : 0.00025;
        simplex.push_back({p, f(p)});
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const SimplexPoint& a, const SimplexPoint& b) {
                             return a.f < b.f;
                         });
    };
    order();

    *converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        double spread = simplex.back().f - simplex.front().f;
        if (spread <= rel_tol * (std::abs(simplex.front().f) + rel_tol)) {
            *converged = true;
            break;
        }

        std::array<double, 5> centroid{};
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t d = 0; d < dim; ++d)
                centroid[d] += simplex[i].x[d] / static_cast<double>(dim);

        auto blend = [&](double t) {
            std::array<double, 5> p;
            for (std::size_t d = 0; d < dim; ++d)
                p[d] = centroid[d] + t * (simplex.back().x[d] - centroid[d]);
            return p;
        };
        std::array<double, 5> reflected = blend(-1.0);
        double fr = f(reflected);

        if (fr < simplex.front().f) {
            std::array<double, 5> expanded = blend(-2.0);
            double fe = f(expanded);
            simplex.back() = fe < fr ? SimplexPoint{expanded, fe}
                                     : SimplexPoint{reflected, fr};
        } else if (fr < simplex[dim - 1].f) {
            simplex.back() = {reflected, fr};
        } else {
            bool outside = fr < simplex.back().f;
            std::array<double, 5> contracted = blend(outside ? -0.5 : 0.5);
            double fc = f(contracted);
            if ((outside && fc <= fr) || (!outside && fc < simplex.back().f)) {
                simplex.back() = {contracted, fc};
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t d = 0; d < dim; ++d)
                        simplex[i].x[d] = simplex.front().x[d] +
                                          0.5 * (simplex[i].x[d] - simplex.front().x[d]);
                    simplex[i].f = f(simplex[i].x);
                }
            }
        }
        order();
    }
    return simplex.front();
}

} // namespace

std::vector<double> logistic_apply(const std::array<double, 5>& beta,
                                   std::span<const double> objective) {
    std::vector<double> out(objective.size());
    for (std::size_t i = 0; i < objective.size(); ++i)
        out[i] = logistic_value(beta, objective[i]);
    return out;
}

LogisticFit logistic_fit(std::span<const double> objective,
                         std::span<const double> subjective) {
    require_pair(objective, subjective, "logistic_fit");
    const std::size_t n = objective.size();

    auto sse = [&](const std::array<double, 5>& beta) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = logistic_value(beta, objective[i]) - subjective[i];
            acc += d * d;
        }
        return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
    };

    double min_sub = subjective[0], max_sub = subjective[0];
    double mean_obj = 0.0, mean_sub = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        min_sub = std::min(min_sub, subjective[i]);
        max_sub = std::max(max_sub, subjective[i]);
        mean_obj += objective[i];
        mean_sub += subjective[i];
    }
    mean_obj /= static_cast<double>(n);
    mean_sub /= static_cast<double>(n);
    double var_obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = objective[i] - mean_obj;
        var_obj += d * d;
    }
    double sd_obj = std::sqrt(var_obj / static_cast<double>(n - 1));
    double inv_sd = sd_obj > 0.0 ? 1.0 / sd_obj : 1.0;

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = objective[i] - mean_obj;
        sxx += dx * dx;
        sxy += dx * (subjective[i] - mean_sub);
    }
    double slope = sxx > 0.0 ? sxy / sxx : 0.0;

    // Start grid around the classic init (range amplitude, 1/sd steepness,
    // centered midpoint). The amplitude sign follows the observed trend, the
    // quartile midpoints rescue fits whose transition is off-center -- with
    // the midpoint started at the mean of a symmetric sample the simplex can
    // converge onto a saddle and never move it. The closed-form regression
    // line joins the grid so the fitted curve never loses to a straight line.
    double amplitude = (sxy < 0.0 ? -1.0 : 1.0) * (max_sub - min_sub);
    std::vector<double> sorted_obj(objective.begin(), objective.end());
    std::sort(sorted_obj.begin(), sorted_obj.end());
    double q1 = sorted_obj[n / 4];
    double q3 = sorted_obj[(3 * n) / 4];

    std::vector<std::array<double, 5>> starts;
    for (double steep : {inv_sd, 4.0 * inv_sd})
        for (double mid : {mean_obj, q1, q3})
            starts.push_back({amplitude, steep, mid, 0.0, mean_sub});
    starts.push_back({0.0, inv_sd, mean_obj, slope, mean_sub - slope * mean_obj});

    LogisticFit best;
    best.sse = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        bool converged = false;
        SimplexPoint result = nelder_mead(sse, start, 2000, 1e-10, &converged);
        // restarting rebuilds a fresh simplex around the found point, which
        // rescues runs whose simplex collapsed before reaching the basin floor
        for (int round = 0; round < 4; ++round) {
            bool again_converged = false;
            SimplexPoint again =
                nelder_mead(sse, result.x, 2000, 1e-10, &again_converged);
            if (!(again.f < result.f))
                break;
            bool negligible =
                result.f - again.f <= 1e-12 * (std::abs(again.f) + 1e-12);
            result = again;
            converged = again_converged;
            if (negligible)
                break;
        }
        if (result.f < best.sse) {
            best.beta = result.x;
            best.sse = result.f;
            best.converged = converged;
        }
    }
    return best;
}

EvaluationReport evaluate_report(std::span<const double> objective,
                                 std::span<const double> subjective,
                                 bool use_logistic) {
    EvaluationReport report;
    report.srcc = srcc(objective, subjective);
    report.krcc = krcc(objective, subjective);
    if (use_logistic) {
        LogisticFit fit = logistic_fit(objective, subjective);
        std::vector<double> mapped = logistic_apply(fit.beta, objective);
        report.pcc = pearson(mapped, subjective);
        report.rmse = rmse(mapped, subjective);
        report.logistic_used = true;
        report.beta = fit.beta;
    } else {
        report.pcc = pearson(objective, subjective);
        report.rmse = rmse(objective, subjective);
    }
    return report;
}

} // namespace mfgp
