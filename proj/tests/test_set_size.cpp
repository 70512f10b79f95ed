#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rambig/set_size.hpp"
#include "rambig/weights.hpp"

using namespace rambig;

TEST_CASE("closed-form Hoeffding radius") {
    CHECK(hoeffding_l1_psi(100, 5, 1, 0.05) == doctest::Approx(0.40177).epsilon(1e-5));
    const double psi = hoeffding_l1_psi(100, 5, 1, 0.05);
    // the radius sits where the printed tail bound equals delta, up to the 2^S vs 2^S-2 slack
    CHECK(hoeffding_l1_tail(psi, 100, 5) <= 0.05);
}

TEST_CASE("tails are monotone and clamped") {
    numvec w = sorted_nonincreasing({0.2, 0.9, 0.4});
    CHECK(w == numvec{0.9, 0.4, 0.2});
    double prev = 1.0;
    for (double psi = 0.0; psi < 2.0; psi += 0.05) {
        const double t = weighted_l1_tail(psi, 50, w);
        CHECK(t <= prev + 1e-15);
        CHECK(t >= 0.0);
        prev = t;
    }
    CHECK(hoeffding_l1_tail(0.0, 10, 4) == 1.0);
    CHECK(weighted_linf_tail(0.0, 10, w) == 1.0);
}

TEST_CASE("weighted L1 tail reduces to the unweighted bound") {
    for (double psi : {0.1, 0.3, 0.7})
        CHECK(weighted_l1_tail(psi, 80, numvec(5, 1.0), true) ==
              doctest::Approx(hoeffding_l1_tail(psi, 80, 5)).epsilon(1e-14));
    CHECK(bernstein_l1_tail(0.3, 80, numvec(5, 1.0), true) ==
          doctest::Approx(bernstein_l1_tail(0.3, 80, 5)).epsilon(1e-14));
}

TEST_CASE("tail inversion") {
    auto tail = [](double psi) { return std::exp(-psi); };
    const double psi = invert_tail_bound(tail, 0.1);
    CHECK(psi == doctest::Approx(std::log(10.0)).epsilon(1e-8));
    CHECK(tail(psi) <= 0.1);
    CHECK(invert_tail_bound([](double) { return 0.0; }, 0.1) == 0.0);
    CHECK_THROWS_AS(invert_tail_bound([](double) { return 1.0; }, 0.1), std::runtime_error);
}

TEST_CASE("credible index") {
    CHECK(credible_index(0.05, 100) == 95);
    CHECK(credible_index(0.1, 10) == 9);
    CHECK(credible_index(0.999, 10) == 1);
    CHECK_THROWS_AS(credible_index(0.0, 10), std::invalid_argument);
}

TEST_CASE("dirichlet draws respect zeros and are reproducible") {
    Engine a(3), b(3);
    auto d1 = sample_dirichlet({1.0, 0.0, 2.0}, 50, a);
    auto d2 = sample_dirichlet({1.0, 0.0, 2.0}, 50, b);
    CHECK(d1 == d2);
    for (const auto& p : d1) {
        CHECK(p[1] == 0.0);
        CHECK(p[0] + p[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("posterior draws are deterministic per pair") {
    SampleStats stats(3, 1);
    stats.add(0, 0, 0, 4);
    stats.add(0, 0, 2, 6);
    PosteriorModel post(stats, 9);
    CHECK(post.concentration(0, 0) == numvec{5.0, 0.0, 7.0});
    CHECK_THROWS_AS(post.concentration(1, 0), InsufficientData);
    CHECK(sample_posterior(post, 0, 0, 20) == sample_posterior(post, 0, 0, 20));
}

TEST_CASE("WBCI radius covers the requested share of draws") {
    SampleStats stats(4, 1);
    stats.add(0, 0, 0, 10);
    stats.add(0, 0, 1, 20);
    stats.add(0, 0, 3, 5);
    PosteriorModel post(stats, 1);
    const auto draws = sample_posterior(post, 0, 0, 1000);
    const numvec w{0.1, 0.5, 0.7, 0.5};
    for (auto norm : {NormKind::L1Weighted, NormKind::LInfWeighted}) {
        auto r = wbci_from_draws(draws, 0.2, w, norm);
        std::size_t inside = 0;
        for (const auto& d : draws)
            if (weighted_distance(d, r.nominal, w, norm) <= r.psi) ++inside;
        CHECK(inside >= credible_index(0.2, 1000));
        CHECK(r.nominal[2] == 0.0);
    }
}

TEST_CASE("budget_for splits delta and restricts the support") {
    SampleStats stats(4, 2);
    stats.add(0, 0, 1, 30);
    stats.add(0, 0, 2, 70);
    for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t a = 0; a < 2; ++a)
            if (stats.n(s, a) == 0) stats.add(s, a, s, 100);

    auto full = budget_for(stats, 0, 0, BudgetMethod::HoeffdingL1, NormKind::L1Weighted, 0.1,
                           uniform_weights(4));
    CHECK(full.delta_used == doctest::Approx(0.1 / 8));
    CHECK(full.psi == doctest::Approx(0.5 * hoeffding_l1_psi(100, 4, 1, 0.1 / 8 * 4)));
    CHECK(full.support.empty());

    BudgetOptions opts;
    opts.restrict_support = true;
    auto restricted = budget_for(stats, 0, 0, BudgetMethod::HoeffdingL1, NormKind::L1Weighted,
                                 0.1, numvec(4, 1.0 / std::sqrt(2.0)), nullptr, opts);
    CHECK(restricted.support == std::vector<std::size_t>{1, 2});
    CHECK(restricted.psi == doctest::Approx(hoeffding_l1_psi(100, 2, 1, 0.1 / 8 * 2) /
                                            std::sqrt(2.0)));
    CHECK(observed_support(stats, 0, 0) == std::vector<std::size_t>{1, 2});

    CHECK_THROWS_AS(budget_for(stats, 0, 0, BudgetMethod::WBCI, NormKind::L1Weighted, 0.1,
                               uniform_weights(4)),
                    std::invalid_argument);
}

TEST_CASE("weighted frequentist radii satisfy their tail bounds") {
    SampleStats stats(3, 1);
    stats.add(0, 0, 0, 20);
    stats.add(0, 0, 1, 30);
    stats.add(0, 0, 2, 50);
    for (std::size_t s = 1; s < 3; ++s) stats.add(s, 0, s, 1);
    const numvec w{0.3, 0.5, 0.812404};
    BudgetOptions opts;
    opts.strengthen_l1 = false;
    auto r = budget_for(stats, 0, 0, BudgetMethod::HoeffdingL1W, NormKind::L1Weighted, 0.3, w,
                        nullptr, opts);
    CHECK(weighted_l1_tail(r.psi, 100, sorted_nonincreasing(w)) <= r.delta_used + 1e-12);
    CHECK(weighted_l1_tail(r.psi - 1e-6, 100, sorted_nonincreasing(w)) > r.delta_used);
    auto li = budget_for(stats, 0, 0, BudgetMethod::HoeffdingLInfW, NormKind::LInfWeighted, 0.3, w);
    CHECK(li.norm == NormKind::LInfWeighted);
    CHECK(weighted_linf_tail(li.psi, 100, w) <= li.delta_used + 1e-12);
}
