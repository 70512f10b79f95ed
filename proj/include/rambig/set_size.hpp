#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rambig/ambiguity.hpp"
#include "rambig/random.hpp"

namespace rambig {

enum class BudgetMethod { WBCI, HoeffdingL1, HoeffdingL1W, HoeffdingLInfW, BernsteinL1, BernsteinL1W };

std::string to_string(BudgetMethod method);

/// Nominal point and radius of one state-action ambiguity set.
struct BudgetResult {
    numvec nominal;
    double psi = 0.0;
    BudgetMethod method = BudgetMethod::WBCI;
    NormKind norm = NormKind::L1Weighted;
    double delta_used = 1.0;
    /// States the set is restricted to; empty means all states.
    std::vector<std::size_t> support;
};

// ---------------------------------------------------------------------------
// Frequentist tail bounds. Each returns an upper bound on
// P[ ||p_hat - p*|| >= psi ] for an empirical estimate from n samples,
// clamped to [0, 1].

/// sqrt((2/n) log(S A 2^S / delta)); zero once the logarithm is nonpositive.
double hoeffding_l1_psi(std::uint64_t n, std::size_t states, std::size_t actions, double delta);

/// Unweighted L1 bound (2^S - 2) exp(-psi^2 n / 2).
double hoeffding_l1_tail(double psi, std::uint64_t n, std::size_t states);

/**
 * Weighted L1 bound 2 sum_{i=1}^{S-1} 2^{S-i} exp(-psi^2 n / (2 w_i^2)).
 * `weights` must be sorted nonincreasing. With `strengthen` the sum is
 * halved, which reduces to hoeffding_l1_tail for equal unit weights.
 */
double weighted_l1_tail(double psi, std::uint64_t n, const numvec& weights,
                        bool strengthen = false);

/// Weighted LInf bound 2 sum_i exp(-2 psi^2 n / w_i^2).
double weighted_linf_tail(double psi, std::uint64_t n, const numvec& weights);

/// Unweighted Bernstein L1 bound (2^S - 2) exp(-3 psi^2 n / (6 + 4 psi)).
/// Experimental constants.
double bernstein_l1_tail(double psi, std::uint64_t n, std::size_t states);

/// Weighted Bernstein L1 bound
/// 2 sum_{i=1}^{S-1} 2^{S-i} exp(-3 psi^2 n / (6 w_i^2 + 4 psi w_i)),
/// halved with `strengthen`. `weights` must be sorted nonincreasing.
double bernstein_l1_tail(double psi, std::uint64_t n, const numvec& weights,
                         bool strengthen = false);

/// Copy of `weights` sorted nonincreasing.
numvec sorted_nonincreasing(numvec weights);

inline constexpr double kBisectionTolerance = 1e-9;

/**
 * Smallest psi (within `tol`) with tail(psi) <= delta_target for a tail
 * that is nonincreasing in psi. The bracket starts at [0, 2] and doubles;
 * throws std::runtime_error if psi would exceed 1e6.
 */
double invert_tail_bound(const std::function<double(double)>& tail, double delta_target,
                         double tol = kBisectionTolerance);

// ---------------------------------------------------------------------------
// Bayesian credible regions

/**
 * Dirichlet posterior over next-state distributions for each pair.
 *
 * The prior puts concentration alpha only on the support it names; states
 * outside the support stay at probability zero in every draw.
 */
class PosteriorModel {
public:
    /// Uniform prior (alpha = 1) over the successors observed in `stats`.
    PosteriorModel(const SampleStats& stats, std::uint64_t seed);

    /// Explicit prior; prior_alpha[s * actions + a] has one entry per state and
    /// zero entries are excluded from the support.
    PosteriorModel(const SampleStats& stats, std::vector<numvec> prior_alpha, std::uint64_t seed);

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }
    std::uint64_t seed() const { return seed_; }

    /// prior + counts; zero outside the support. Throws InsufficientData when
    /// the support is empty.
    const numvec& concentration(std::size_t s, std::size_t a) const;

private:
    std::size_t states_, actions_;
    std::vector<numvec> concentration_;
    std::uint64_t seed_;
};

/// m independent Dirichlet(alpha) draws; zero alpha entries stay zero.
std::vector<numvec> sample_dirichlet(const numvec& alpha, std::size_t m, Engine& engine);

/// m posterior draws for (s,a); deterministic in (model seed, s, a).
std::vector<numvec> sample_posterior(const PosteriorModel& posterior, std::size_t s,
                                     std::size_t a, std::size_t m);

/// ceil((1 - delta) m) clamped to [1, m], robust to rounding of (1-delta) m.
std::size_t credible_index(double delta, std::size_t m);

/**
 * Weighted Bayesian credible interval from precomputed draws: the nominal
 * point is the mean of the draws and psi is the credible_index-th smallest
 * weighted distance between the nominal and a draw.
 */
BudgetResult wbci_from_draws(const std::vector<numvec>& draws, double delta,
                             const numvec& weights, NormKind norm);

/// Samples m draws for (s,a) and applies wbci_from_draws.
BudgetResult wbci(const PosteriorModel& posterior, std::size_t s, std::size_t a, double delta,
                  std::size_t m, const numvec& weights, NormKind norm = NormKind::L1Weighted);

// ---------------------------------------------------------------------------

struct BudgetOptions {
    std::size_t posterior_draws = 10000;
    /// Halve the weighted L1 bounds (Hoeffding and Bernstein).
    bool strengthen_l1 = true;
    /// Number of pairs sharing delta in the union bound; 0 means S * A.
    std::size_t pair_count = 0;
    /// Restrict each set to the observed successors of its pair; the
    /// frequentist bounds then count only those states.
    bool restrict_support = false;
    double tol = kBisectionTolerance;
};

/// Successors of (s,a) with a nonzero count; empty when all states were observed.
std::vector<std::size_t> observed_support(const SampleStats& stats, std::size_t s, std::size_t a);

/**
 * Budget for pair (s,a) with the global failure probability split evenly
 * over pairs (delta_used = delta_global / pair_count). `norm` selects the
 * distance used by WBCI; the frequentist methods imply their own norm.
 * `weights` are used as given (normalize them first); with
 * restrict_support only their entries on the observed support matter. WBCI needs
 * `posterior`; `draws`, when given, replaces sampling.
 */
BudgetResult budget_for(const SampleStats& stats, std::size_t s, std::size_t a,
                        BudgetMethod method, NormKind norm, double delta_global,
                        const numvec& weights, const PosteriorModel* posterior = nullptr,
                        const BudgetOptions& options = {},
                        const std::vector<numvec>* draws = nullptr);

} // namespace rambig
