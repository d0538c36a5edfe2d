#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "mfgp/errors.hpp"
#include "mfgp/quality.hpp"
#include "mfgp/rng.hpp"
#include "oracles.hpp"

using namespace mfgp;

namespace {

// values drawn from a small grid so ties happen constantly
std::vector<double> gridded(Rng& rng, std::size_t n, int levels) {
    std::vector<double> v(n);
    for (double& x : v)
        x = static_cast<double>(rng.uniform_index(static_cast<std::size_t>(levels)));
    return v;
}

std::vector<double> smooth(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v)
        x = rng.uniform_real() * 10.0 - 5.0;
    return v;
}

} // namespace

TEST_SUITE("quality") {

TEST_CASE("average ranks share the mean over tied runs") {
    std::vector<double> v{10.0, 20.0, 20.0, 30.0};
    std::vector<double> expected{1.0, 2.5, 2.5, 4.0};
    CHECK(average_ranks(v) == expected);

    std::vector<double> all_tied{5.0, 5.0, 5.0};
    std::vector<double> mid{2.0, 2.0, 2.0};
    CHECK(average_ranks(all_tied) == mid);

    std::vector<double> rev{3.0, 2.0, 1.0};
    std::vector<double> rev_ranks{3.0, 2.0, 1.0};
    CHECK(average_ranks(rev) == rev_ranks);

    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x = gridded(rng, 2 + rng.uniform_index(60), 6);
        CHECK(average_ranks(x) == oracle::average_ranks(x));
    }
}

TEST_CASE("pearson matches the product-moment oracle") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    std::vector<double> b{2.0, 4.0, 6.0, 8.0};
    CHECK(pearson(a, b) == doctest::Approx(1.0));
    std::vector<double> c{8.0, 6.0, 4.0, 2.0};
    CHECK(pearson(a, c) == doctest::Approx(-1.0));

    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3 + rng.uniform_index(50);
        std::vector<double> x = smooth(rng, n), y = smooth(rng, n);
        CHECK(oracle::near(pearson(x, y), oracle::pearson(x, y), 1e-12));
    }

    std::vector<double> flat{3.0, 3.0, 3.0};
    std::vector<double> any{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(pearson(flat, any), DataError);
    CHECK_THROWS_AS(pearson(any, flat), DataError);

    std::vector<double> one{1.0};
    CHECK_THROWS_AS(pearson(one, one), DataError);
    CHECK_THROWS_AS(pearson(a, any), DataError); // length mismatch
}

TEST_CASE("spearman is +-1 for monotone data and matches the oracle with ties") {
    std::vector<double> x{0.1, 0.5, 0.9, 2.0, 7.0};
    std::vector<double> up{1.0, 4.0, 9.0, 16.0, 25.0};
    CHECK(srcc(x, up) == doctest::Approx(1.0));
    std::vector<double> down{25.0, 16.0, 9.0, 4.0, 1.0};
    CHECK(srcc(x, down) == doctest::Approx(-1.0));

    Rng rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 3 + rng.uniform_index(40);
        std::vector<double> a = gridded(rng, n, 5), b = gridded(rng, n, 5);
        bool a_flat = std::all_of(a.begin(), a.end(),
                                  [&](double v) { return v == a[0]; });
        bool b_flat = std::all_of(b.begin(), b.end(),
                                  [&](double v) { return v == b[0]; });
        if (a_flat || b_flat) {
            CHECK_THROWS_AS(srcc(a, b), DataError);
            continue;
        }
        CHECK(oracle::near(srcc(a, b), oracle::srcc(a, b), 1e-12));
    }

    std::vector<double> flat{2.0, 2.0, 2.0};
    std::vector<double> any{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(srcc(flat, any), DataError);
}

TEST_CASE("kendall tau-b: exact fixed value and tie handling") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{1.0, 3.0, 2.0};
    // one discordant pair out of three: (1 - 2*1/3) exactly
    CHECK(krcc(a, b) == 1.0 / 3.0);

    std::vector<double> up{1.0, 2.0, 3.0, 4.0};
    std::vector<double> up2{10.0, 20.0, 30.0, 40.0};
    CHECK(krcc(up, up2) == 1.0);
    std::vector<double> down{40.0, 30.0, 20.0, 10.0};
    CHECK(krcc(up, down) == -1.0);

    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 3 + rng.uniform_index(40);
        std::vector<double> x = gridded(rng, n, 4), y = gridded(rng, n, 4);
        bool x_flat = std::all_of(x.begin(), x.end(),
                                  [&](double v) { return v == x[0]; });
        bool y_flat = std::all_of(y.begin(), y.end(),
                                  [&](double v) { return v == y[0]; });
        if (x_flat || y_flat) {
            CHECK_THROWS_AS(krcc(x, y), DataError);
            continue;
        }
        CHECK(oracle::near(krcc(x, y), oracle::krcc(x, y), 1e-12));
    }

    std::vector<double> flat{7.0, 7.0, 7.0};
    std::vector<double> any{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(krcc(flat, any), DataError);
    CHECK_THROWS_AS(krcc(any, flat), DataError);
}

TEST_CASE("rmse fixed values") {
    std::vector<double> p{0.0, 0.0};
    std::vector<double> y{3.0, 4.0};
    CHECK(rmse(p, y) == std::sqrt(12.5));
    std::vector<double> same{1.0, 2.0, 3.0};
    CHECK(rmse(same, same) == 0.0);
}

TEST_CASE("logistic fit never loses to the straight line") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 10 + rng.uniform_index(40);
        std::vector<double> x = smooth(rng, n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = 1.7 * x[i] + 0.4 + 0.3 * (rng.uniform_real() - 0.5);
        LogisticFit fit = logistic_fit(x, y);
        double line = oracle::linear_sse(x, y);
        CHECK(fit.sse <= line + 1e-9);
        CHECK(std::isfinite(fit.sse));
    }
}

TEST_CASE("logistic fit recovers a planted curve well") {
    // data generated from the model family itself, no noise
    std::array<double, 5> beta{2.0, 1.5, 0.3, 0.2, 1.0};
    std::vector<double> x;
    for (int i = 0; i <= 60; ++i)
        x.push_back(-3.0 + 0.1 * i);
    std::vector<double> y = logistic_apply(beta, x);
    LogisticFit fit = logistic_fit(x, y);
    // per-sample error far below the data scale
    CHECK(fit.sse / static_cast<double>(x.size()) < 1e-4);
    std::vector<double> fitted = logistic_apply(fit.beta, x);
    CHECK(rmse(fitted, y) < 1e-2);
}

TEST_CASE("a strictly monotone fitted map cannot change the rank metrics") {
    Rng rng(41);
    int monotone_seen = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 15 + rng.uniform_index(25);
        std::vector<double> x = smooth(rng, n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = 3.0 / (1.0 + std::exp(-x[i])) + 0.1 * (rng.uniform_real() - 0.5);
        LogisticFit fit = logistic_fit(x, y);
        std::vector<double> mapped = logistic_apply(fit.beta, x);

        // check whether the realized map is strictly increasing in x
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        bool strict = true;
        for (std::size_t k = 1; k < n; ++k)
            strict = strict && mapped[order[k - 1]] < mapped[order[k]];
        if (!strict)
            continue;
        ++monotone_seen;
        // identical average ranks => bitwise-equal rank correlations
        CHECK(srcc(mapped, y) == srcc(x, y));
        CHECK(krcc(mapped, y) == krcc(x, y));
    }
    CHECK(monotone_seen > 0);
}

TEST_CASE("evaluate_report wires the pieces together") {
    std::vector<double> x{0.5, 1.5, 2.5, 3.5, 4.5, 5.5};
    std::vector<double> y{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};

    EvaluationReport raw = evaluate_report(x, y, false);
    CHECK(!raw.logistic_used);
    CHECK(raw.srcc == doctest::Approx(1.0));
    CHECK(raw.krcc == 1.0);
    CHECK(raw.pcc == doctest::Approx(1.0));
    CHECK(raw.rmse == doctest::Approx(0.5)); // constant offset of 0.5

    EvaluationReport mapped = evaluate_report(x, y, true);
    CHECK(mapped.logistic_used);
    CHECK(mapped.srcc == raw.srcc); // rank metrics stay raw
    CHECK(mapped.krcc == raw.krcc);
    // the line y = x + 0.5 is inside the model family: essentially perfect
    CHECK(mapped.rmse < 1e-6);
    CHECK(mapped.pcc > 0.999999);
}

} // TEST_SUITE
