#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rambig/mdp.hpp"

namespace rambig {

enum class DomainKind { SingleBellman, RiverSwim, Inventory, Population };

std::string to_string(DomainKind kind);
/// Accepts single_bellman, riverswim, inventory, population (case-insensitive).
DomainKind parse_domain_kind(const std::string& name);

/// Benchmark problem together with the parameters that generated it.
struct DomainSpec {
    DomainKind kind;
    std::map<std::string, double> params;
    TabularMdp true_mdp;
    /// Terminal values of the single Bellman update (empty otherwise).
    ValueFunction terminal_values;
};

inline constexpr double kDefaultDiscount = 0.95;

/**
 * State 0 with a single action moving uniformly to five absorbing terminals
 * 1..5. Terminal i pays (1 - gamma) values[i-1] per step, so its value is
 * exactly values[i-1].
 */
DomainSpec make_single_bellman(const ValueFunction& values, double discount = kDefaultDiscount);

/**
 * Six-state RiverSwim. Left moves one state left (staying in s0 with
 * reward 5). Right: s0 stays w.p. 0.7 and moves right w.p. 0.3; interior
 * states stay 0.6, right 0.3, left 0.1; s5 stays 0.3 collecting 10000 and
 * falls back w.p. 0.7. Rewards are expected per step. Starts in s1 or s2.
 */
DomainSpec make_riverswim(double discount = kDefaultDiscount);

/**
 * Inventory control with stock levels 0..S-1 and order quantities 0..S-1.
 * Orders beyond capacity are paid for but discarded. Demand is a normal
 * with mean S/4 and sd S/6 binned to integers with the tails folded into
 * 0 and S-1. Reward = 3.99 E[sales] - 2.49 order - 0.03 stock.
 */
DomainSpec make_inventory(std::size_t states = 10, double discount = kDefaultDiscount);

struct PopulationCosts {
    std::size_t levels = 20;
    double control_cost = 10.0;
    double noise_sd = 0.2;
    std::size_t noise_points = 9;
    std::size_t initial_level = 10;
};

/**
 * Discretized exponential growth. Action 0 grows the level by growth_rate,
 * action 1 by growth_rate - control_effect, each times lognormal noise on a
 * quantile grid; the result is stochastically rounded and clipped to the
 * top level. Level 0 is absorbing. Reward = -(level + control_cost * a).
 */
DomainSpec make_population(double growth_rate = 1.3, double control_effect = 0.5,
                           const PopulationCosts& costs = {},
                           double discount = kDefaultDiscount);

/**
 * Builds a domain from its name and a parameter map (missing parameters
 * take their defaults). Unknown parameter names are rejected.
 */
DomainSpec make_domain(DomainKind kind, const std::map<std::string, double>& params,
                       const ValueFunction& values = {});

/// samples_per_sa i.i.d. next states for every pair; the stream of (s,a)
/// is seeded with derive_seed(seed, {s, a}).
SampleStats simulate_dataset(const DomainSpec& spec, std::size_t samples_per_sa,
                             std::uint64_t seed);

/// Samples of the single Bellman decision pair, re-indexed over the five
/// terminals as pair (0,0) of a 5-state, 1-action dataset.
SampleStats decision_samples(const SampleStats& stats);

} // namespace rambig
