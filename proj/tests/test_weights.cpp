#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rambig/weights.hpp"

using namespace rambig;

namespace {

double sum_squares(const numvec& w) {
    double s = 0.0;
    for (double x : w) s += x * x;
    return s;
}

} // namespace

TEST_CASE("L1 weights proportional to deviations") {
    // z = [0, 7] around lambda 3: b = [3, 4]
    auto sol = optimal_weights_l1({0, 7}, 3.0);
    CHECK(sol.weights[0] == doctest::Approx(0.6));
    CHECK(sol.weights[1] == doctest::Approx(0.8));
    CHECK(sol.objective == doctest::Approx(5.0));
    CHECK_FALSE(sol.degenerate);

    auto w = optimal_weights_l1({1, 8}, 0.0).weights;
    CHECK(w[0] == doctest::Approx(1.0 / std::sqrt(65.0)));
    CHECK(w[1] == doctest::Approx(8.0 / std::sqrt(65.0)));
}

TEST_CASE("LInf weights use cube roots") {
    auto sol = optimal_weights_linf({0, 9}, 1.0); // b = [1, 8]
    CHECK(sol.weights[0] == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(sol.weights[1] == doctest::Approx(2.0 / std::sqrt(5.0)));
    CHECK(sol.objective == doctest::Approx(std::sqrt(5.0) + 4.0 * std::sqrt(5.0)));
}

TEST_CASE("degenerate and floored cases") {
    auto sol = optimal_weights({2, 2, 2, 2}, NormKind::L1Weighted);
    CHECK(sol.degenerate);
    for (double w : sol.weights) CHECK(w == doctest::Approx(0.5));
    auto floored = optimal_weights_l1({0, 5, 10}, 5.0);
    CHECK(floored.weights[1] > 0.0);
    CHECK(sum_squares(floored.weights) == doctest::Approx(1.0));
    CHECK(default_lambda_bar({1, 9, 2}, NormKind::L1Weighted) == 5.0);
    CHECK(default_lambda_bar({1, 9, 2}, NormKind::LInfWeighted) == 2.0);
    CHECK(uniform_weights(4) == numvec(4, 0.5));
}

TEST_CASE("weights beat random unit vectors") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        numvec b(5);
        for (auto& x : b) x = std::abs(g(rng)) + 1e-3;
        numvec z(b); // lambda 0 with nonnegative z gives deviations b
        auto l1 = optimal_weights_l1(z, 0.0);
        auto linf = optimal_weights_linf(z, 0.0);
        CHECK(sum_squares(l1.weights) == doctest::Approx(1.0));
        CHECK(sum_squares(linf.weights) == doctest::Approx(1.0));
        for (int k = 0; k < 200; ++k) {
            numvec w(5);
            for (auto& x : w) x = std::abs(g(rng));
            const double norm = std::sqrt(sum_squares(w));
            double mx = 0.0, sm = 0.0;
            for (std::size_t i = 0; i < 5; ++i) {
                w[i] /= norm;
                mx = std::max(mx, b[i] / w[i]);
                sm += b[i] / w[i];
            }
            CHECK(l1.objective <= mx * (1 + 1e-12));
            CHECK(linf.objective <= sm * (1 + 1e-12));
        }
    }
}
