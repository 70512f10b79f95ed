#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rambig {

using numvec = std::vector<double>;

/// State values (v, z or the robust fixed point); indexed by state.
using ValueFunction = numvec;

/// Tolerance used when checking that a vector lies on the probability simplex.
inline constexpr double kSimplexTol = 1e-12;

/// Raised when a query touches a state-action pair with no observed transitions.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless `p` is nonnegative and sums to one
/// within `tol`. `what` names the offending object in the message.
void check_distribution(const numvec& p, const std::string& what, double tol = kSimplexTol);

/**
 * Finite MDP with state-action rewards and a nominal transition kernel.
 *
 * Rewards and kernel rows are stored state-major: pair (s,a) lives at
 * index s * actions + a. The constructor validates every invariant and the
 * object is immutable afterwards.
 */
class TabularMdp {
public:
    TabularMdp(std::size_t states, std::size_t actions, numvec rewards,
               std::vector<numvec> kernel, double discount, numvec initial);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }
    std::size_t pairs() const { return states_ * actions_; }
    std::size_t index(std::size_t s, std::size_t a) const { return s * actions_ + a; }

    double reward(std::size_t s, std::size_t a) const { return rewards_[index(s, a)]; }
    const numvec& row(std::size_t s, std::size_t a) const { return kernel_[index(s, a)]; }
    double discount() const { return discount_; }
    const numvec& initial() const { return initial_; }
    const numvec& rewards() const { return rewards_; }
    const std::vector<numvec>& kernel() const { return kernel_; }

    /// Same rewards, discount and initial distribution with a different kernel.
    TabularMdp with_kernel(std::vector<numvec> kernel) const;

private:
    std::size_t states_;
    std::size_t actions_;
    numvec rewards_;
    std::vector<numvec> kernel_;
    double discount_;
    numvec initial_;
};

/// Deterministic stationary policy.
struct Policy {
    std::vector<std::size_t> action_of;

    bool operator==(const Policy&) const = default;
};

void check_policy(const TabularMdp& mdp, const Policy& policy);

inline constexpr double kDefaultTolerance = 1e-9;

/// Successive-iterate threshold that guarantees a Bellman residual of at most `tol`.
double stopping_threshold(double discount, double tol);

/**
 * Nominal value iteration.
 *
 * Stops once successive iterates differ by at most tol (1-gamma)/gamma in
 * max norm, so the returned values have Bellman residual at most tol. The
 * policy is greedy with respect to the returned values; ties go to the
 * lowest action index.
 */
std::pair<ValueFunction, Policy> value_iteration(const TabularMdp& mdp,
                                                 double tol = kDefaultTolerance);

/// Value of `policy` under the nominal kernel with residual at most `tol`.
ValueFunction evaluate_policy(const TabularMdp& mdp, const Policy& policy,
                              double tol = kDefaultTolerance);

/// Initial-distribution weighted value of `policy`, i.e. the discounted return.
double evaluate_return(const TabularMdp& mdp, const Policy& policy,
                       double tol = kDefaultTolerance);

/// max_s |(T v)(s) - v(s)| for the nominal optimality operator T.
double bellman_residual(const TabularMdp& mdp, const ValueFunction& v);

/// Greedy policy with respect to `v` (lowest action index on ties).
Policy greedy_policy(const TabularMdp& mdp, const ValueFunction& v);

/// One observed transition.
struct Transition {
    std::size_t from;
    std::size_t action;
    std::size_t to;
};

/**
 * Transition counts and empirical next-state distributions.
 *
 * Counts are stored per pair (s,a) at index s * actions + a. Pairs without
 * samples are allowed; asking for their empirical distribution throws
 * InsufficientData.
 */
class SampleStats {
public:
    SampleStats(std::size_t states, std::size_t actions);

    void add(std::size_t from, std::size_t action, std::size_t to, std::uint64_t count = 1);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }
    std::size_t index(std::size_t s, std::size_t a) const { return s * actions_ + a; }

    std::uint64_t n(std::size_t s, std::size_t a) const { return totals_[index(s, a)]; }
    std::uint64_t count(std::size_t s, std::size_t a, std::size_t to) const {
        return counts_[index(s, a) * states_ + to];
    }
    /// Counts over next states for pair (s,a).
    std::vector<std::uint64_t> counts(std::size_t s, std::size_t a) const;

    /// counts / n; throws InsufficientData when n(s,a) = 0.
    numvec empirical(std::size_t s, std::size_t a) const;

    /// True when every state-action pair has at least one sample.
    bool covers_all() const;

    bool operator==(const SampleStats&) const = default;

private:
    std::size_t states_;
    std::size_t actions_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> totals_;
};

/// Builds statistics from individual transitions. The state and action
/// counts default to one past the largest index seen.
SampleStats empirical_from_samples(const std::vector<Transition>& transitions,
                                   std::size_t states = 0, std::size_t actions = 0);

/**
 * Reads a dataset CSV. Accepts either `state_from,action,state_to` (one row
 * per transition) or `state_from,action,state_to,count` (aggregated).
 * Malformed rows are reported with their 1-based line number.
 */
SampleStats read_dataset_csv(const std::filesystem::path& path, std::size_t states = 0,
                             std::size_t actions = 0);

/// Writes the aggregated `state_from,action,state_to,count` form (nonzero counts only).
void write_dataset_csv(const SampleStats& stats, const std::filesystem::path& path);

/// Writes `state_from,action,state_to,probability,reward` rows for every
/// nonzero kernel entry.
void write_mdp_csv(const TabularMdp& mdp, const std::filesystem::path& path);

} // namespace rambig
