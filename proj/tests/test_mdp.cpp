#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rambig/mdp.hpp"

using namespace rambig;

namespace {

TabularMdp two_state() {
    // s0: a0 stays (r=1), a1 jumps to s1 (r=0); s1 absorbing with r=2
    return TabularMdp(2, 2, {1.0, 0.0, 2.0, 2.0}, {{1, 0}, {0, 1}, {0, 1}, {0, 1}}, 0.9,
                      {1.0, 0.0});
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "rambig_test_mdp";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("constructor rejects broken inputs") {
    CHECK_THROWS_AS(TabularMdp(2, 1, {0, 0}, {{0.5, 0.4}, {0, 1}}, 0.9, {1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp(2, 1, {0, 0}, {{1, 0}, {0, 1}}, 1.0, {1, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp(2, 1, {0}, {{1, 0}, {0, 1}}, 0.9, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp(2, 1, {0, 0}, {{1, 0}, {0, 1}}, 0.9, {0.5, 0.6}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TabularMdp(2, 1, {0, 0}, {{1.2, -0.2}, {0, 1}}, 0.9, {1, 0}),
                    std::invalid_argument);
}

TEST_CASE("value iteration on a hand-solved chain") {
    auto mdp = two_state();
    auto [v, pi] = value_iteration(mdp);
    // jumping: 0 + 0.9 * 20 = 18 beats staying at 10
    CHECK(v[1] == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(v[0] == doctest::Approx(18.0).epsilon(1e-8));
    CHECK(pi.action_of == std::vector<std::size_t>{1, 0});
    CHECK(bellman_residual(mdp, v) <= kDefaultTolerance);
    CHECK(evaluate_return(mdp, pi) == doctest::Approx(18.0).epsilon(1e-8));
}

TEST_CASE("value iteration matches policy enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto mdp = oracle::random_mdp(4, 3, 0.9, rng);
        auto exact = oracle::optimal_values(mdp);
        auto [v, pi] = value_iteration(mdp, 1e-10);
        for (std::size_t s = 0; s < 4; ++s) CHECK(v[s] == doctest::Approx(exact[s]).epsilon(1e-8));
        auto vp = oracle::policy_value(mdp, pi.action_of);
        for (std::size_t s = 0; s < 4; ++s) CHECK(vp[s] == doctest::Approx(exact[s]).epsilon(1e-7));
    }
}

TEST_CASE("policy evaluation matches the linear solve") {
    std::mt19937_64 rng(5);
    auto mdp = oracle::random_mdp(5, 2, 0.95, rng);
    Policy pi{{0, 1, 1, 0, 1}};
    auto v = evaluate_policy(mdp, pi, 1e-10);
    auto exact = oracle::policy_value(mdp, pi.action_of);
    for (std::size_t s = 0; s < 5; ++s) CHECK(v[s] == doctest::Approx(exact[s]).epsilon(1e-8));
    CHECK_THROWS_AS(check_policy(mdp, Policy{{0, 2, 0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("sample statistics") {
    SampleStats stats(3, 2);
    stats.add(0, 1, 2);
    stats.add(0, 1, 2);
    stats.add(0, 1, 0, 2);
    CHECK(stats.n(0, 1) == 4);
    CHECK(stats.empirical(0, 1) == numvec{0.5, 0.0, 0.5});
    CHECK_THROWS_AS(stats.empirical(1, 0), InsufficientData);
    CHECK_FALSE(stats.covers_all());

    auto built = empirical_from_samples({{0, 1, 2}, {1, 0, 1}});
    CHECK(built.states() == 3);
    CHECK(built.actions() == 2);
    CHECK(built.count(0, 1, 2) == 1);
}

TEST_CASE("dataset csv round trip and errors") {
    SampleStats stats(3, 2);
    stats.add(0, 0, 1, 3);
    stats.add(2, 1, 0, 5);
    auto path = temp_file("ds.csv");
    write_dataset_csv(stats, path);
    CHECK(read_dataset_csv(path, 3, 2) == stats);

    auto raw = temp_file("raw.csv");
    {
        std::ofstream out(raw);
        out << "state_from,action,state_to\n0,0,1\n0,0,1\n1,1,2\n";
    }
    auto r = read_dataset_csv(raw);
    CHECK(r.count(0, 0, 1) == 2);
    CHECK(r.n(1, 1) == 1);

    auto bad = temp_file("bad.csv");
    {
        std::ofstream out(bad);
        out << "state_from,action,state_to\n0,0,1\n0,x,1\n";
    }
    try {
        read_dataset_csv(bad);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}
