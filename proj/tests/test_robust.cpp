#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rambig/robust.hpp"

using namespace rambig;

namespace {

RobustProblem random_problem(std::size_t S, std::size_t A, NormKind norm, double budget,
                             std::mt19937_64& rng) {
    auto mdp = oracle::random_mdp(S, A, 0.9, rng);
    std::uniform_real_distribution<double> w(0.2, 1.5);
    RobustProblem problem{mdp, {}};
    for (std::size_t i = 0; i < mdp.pairs(); ++i) {
        numvec weights(S);
        for (auto& x : weights) x = w(rng);
        problem.sets.push_back({norm, weights, budget, mdp.kernel()[i], {}});
    }
    return problem;
}

// Robust value iteration with every inner problem solved by vertex enumeration.
numvec oracle_robust_values(const RobustProblem& problem) {
    const auto& mdp = problem.skeleton;
    numvec v(mdp.states(), 0.0);
    for (int it = 0; it < 400; ++it) {
        numvec next(mdp.states(), -1e300);
        for (std::size_t s = 0; s < mdp.states(); ++s)
            for (std::size_t a = 0; a < mdp.actions(); ++a)
                next[s] = std::max(next[s],
                                   mdp.reward(s, a) + mdp.discount() *
                                                          oracle::worst_case(
                                                              v, problem.sets[mdp.index(s, a)]));
        v = next;
    }
    return v;
}

SampleStats stats_for(const TabularMdp& mdp, std::uint64_t n) {
    SampleStats stats(mdp.states(), mdp.actions());
    for (std::size_t s = 0; s < mdp.states(); ++s)
        for (std::size_t a = 0; a < mdp.actions(); ++a)
            for (std::size_t t = 0; t < mdp.states(); ++t) {
                const auto c = static_cast<std::uint64_t>(std::llround(mdp.row(s, a)[t] * n));
                if (c > 0) stats.add(s, a, t, c);
            }
    return stats;
}

} // namespace

TEST_CASE("robust value iteration matches the enumeration oracle") {
    std::mt19937_64 rng(7);
    for (auto norm : {NormKind::L1Weighted, NormKind::LInfWeighted}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto problem = random_problem(3, 2, norm, 0.3, rng);
            auto sol = robust_value_iteration(problem, 1e-10);
            auto exact = oracle_robust_values(problem);
            for (std::size_t s = 0; s < 3; ++s)
                CHECK(sol.value[s] == doctest::Approx(exact[s]).epsilon(1e-8));
        }
    }
}

TEST_CASE("zero budget reduces to the nominal MDP") {
    std::mt19937_64 rng(8);
    auto problem = random_problem(4, 3, NormKind::L1Weighted, 0.0, rng);
    auto sol = robust_value_iteration(problem, 1e-10);
    auto exact = oracle::optimal_values(problem.skeleton);
    for (std::size_t s = 0; s < 4; ++s) CHECK(sol.value[s] == doctest::Approx(exact[s]).epsilon(1e-8));
}

TEST_CASE("contraction and monotonicity in the budget") {
    std::mt19937_64 rng(9);
    auto problem = random_problem(4, 2, NormKind::L1Weighted, 0.1, rng);
    auto small = robust_value_iteration(problem, 1e-10);
    for (std::size_t k = 1; k < small.increments.size(); ++k)
        CHECK(small.increments[k] <= 0.9 * small.increments[k - 1] + 1e-12);
    for (auto& set : problem.sets) set.budget = 0.5;
    auto large = robust_value_iteration(problem, 1e-10);
    for (std::size_t s = 0; s < 4; ++s) CHECK(large.value[s] <= small.value[s] + 1e-8);
}

TEST_CASE("worst-case kernel certifies the robust values") {
    std::mt19937_64 rng(10);
    auto problem = random_problem(3, 2, NormKind::LInfWeighted, 0.2, rng);
    auto sol = robust_value_iteration(problem, 1e-11);
    auto kernel = worst_case_kernel(sol.value, problem);
    auto worst = problem.skeleton.with_kernel(kernel);
    auto v = oracle::policy_value(worst, sol.policy.action_of);
    for (std::size_t s = 0; s < 3; ++s) CHECK(v[s] == doctest::Approx(sol.value[s]).epsilon(1e-8));
}

TEST_CASE("validate rejects mismatched sets") {
    std::mt19937_64 rng(12);
    auto problem = random_problem(2, 2, NormKind::L1Weighted, 0.1, rng);
    problem.sets.pop_back();
    CHECK_THROWS_AS(robust_value_iteration(problem), std::invalid_argument);
}

TEST_CASE("method specs") {
    MethodSpec bci{Estimator::BCI, NormKind::L1Weighted, true};
    CHECK(bci.label() == "BCI/L1/weighted");
    CHECK(bci.budget_method() == BudgetMethod::WBCI);
    CHECK(MethodSpec{Estimator::Hoeffding, NormKind::L1Weighted, false}.budget_method() ==
          BudgetMethod::HoeffdingL1);
    CHECK(MethodSpec{Estimator::Hoeffding, NormKind::LInfWeighted, false}.budget_method() ==
          BudgetMethod::HoeffdingLInfW);
    CHECK(MethodSpec{Estimator::Bernstein, NormKind::L1Weighted, true}.budget_method() ==
          BudgetMethod::BernsteinL1W);
    CHECK_THROWS_AS(MethodSpec({Estimator::Bernstein, NormKind::LInfWeighted, false}).budget_method(),
                    std::invalid_argument);
}

TEST_CASE("single update with the unweighted Hoeffding set") {
    SampleStats stats(5, 1);
    const std::uint64_t c[] = {20, 25, 15, 30, 10};
    for (std::size_t t = 0; t < 5; ++t) stats.add(0, 0, t, c[t]);
    const numvec values{1, 2, 3, 4, 5};
    auto r = single_update_guarantee(stats, values,
                                     {Estimator::Hoeffding, NormKind::L1Weighted, false}, 0.05);
    const double psi = hoeffding_l1_psi(100, 5, 1, 0.05 * 5);
    const auto set = AmbiguitySet::uniform(NormKind::L1Weighted, {0.2, 0.25, 0.15, 0.3, 0.1}, psi);
    CHECK(r.guaranteed_value == doctest::Approx(oracle::worst_case(values, set)).epsilon(1e-10));
    CHECK(r.budget.delta_used == doctest::Approx(0.05));
}

TEST_CASE("pipeline is a lower bound that tightens with data") {
    std::mt19937_64 rng(13);
    auto mdp = oracle::random_mdp(3, 2, 0.9, rng);
    auto nominal = oracle::optimal_values(mdp);
    double nominal_return = 0.0;
    for (std::size_t s = 0; s < 3; ++s) nominal_return += mdp.initial()[s] * nominal[s];
    PipelineConfig config;
    config.budget.posterior_draws = 500;
    for (bool weighted : {false, true}) {
        MethodSpec m{Estimator::Hoeffding, NormKind::L1Weighted, weighted};
        auto small = run_weighted_pipeline(stats_for(mdp, 100), mdp, m, 0.1, config);
        auto large = run_weighted_pipeline(stats_for(mdp, 10000), mdp, m, 0.1, config);
        CHECK(small.guaranteed_return <= nominal_return + 1e-3);
        CHECK(large.guaranteed_return >= small.guaranteed_return);
        CHECK(large.guaranteed_return == doctest::Approx(nominal_return).epsilon(0.1));
        CHECK(small.per_sa_budgets.size() == 6);
        CHECK(small.weights_used.size() == 6);
        CHECK(small.psi_mean() > large.psi_mean());
    }
    MethodSpec bci{Estimator::BCI, NormKind::L1Weighted, true};
    auto a = run_weighted_pipeline(stats_for(mdp, 100), mdp, bci, 0.1, config);
    auto b = run_weighted_pipeline(stats_for(mdp, 100), mdp, bci, 0.1, config);
    CHECK(a.guaranteed_return == b.guaranteed_return);
}

TEST_CASE("run_cells orders rows and is thread-count independent") {
    std::vector<MethodSpec> methods{{Estimator::BCI, NormKind::L1Weighted, false},
                                    {Estimator::Hoeffding, NormKind::LInfWeighted, true}};
    auto cell = [](const MethodSpec& m, double conf, std::size_t t) {
        return CellResult{conf * 10.0 + static_cast<double>(t) + (m.weighted ? 100.0 : 0.0), conf};
    };
    auto one = run_cells(methods, {0.5, 0.9}, 3, cell, 1);
    auto many = run_cells(methods, {0.5, 0.9}, 3, cell, 4);
    REQUIRE(one.size() == 12);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].guaranteed_return == many[i].guaranteed_return);
        CHECK(one[i].wallclock_ms == 0);
    }
    CHECK(one[4].method == methods[0]);
    CHECK(one[4].confidence == 0.9);
    CHECK(one[4].trial == 1);
    CHECK(one[6].method == methods[1]);
    auto throwing = [](const MethodSpec&, double, std::size_t t) -> CellResult {
        if (t == 2) throw std::runtime_error("boom");
        return {};
    };
    CHECK_THROWS_AS(run_cells(methods, {0.5}, 3, throwing, 2), std::runtime_error);
}
