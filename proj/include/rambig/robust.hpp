#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rambig/set_size.hpp"
#include "rambig/weights.hpp"

namespace rambig {

/// (s,a)-rectangular robust MDP: the skeleton's kernel holds the nominal
/// rows and sets[s * actions + a] is the ambiguity set of pair (s,a).
struct RobustProblem {
    TabularMdp skeleton;
    std::vector<AmbiguitySet> sets;

    void validate() const;
};

/**
 * One robust Bellman update:
 *   v'(s) = max_a r(s,a) + gamma min_{p in P(s,a)} p'v.
 * Ties between actions go to the lowest index.
 */
std::pair<ValueFunction, Policy> robust_bellman_update(const ValueFunction& v,
                                                       const RobustProblem& problem);

struct RobustSolution {
    ValueFunction value;
    Policy policy;
    std::size_t iterations = 0;
    /// max-norm difference between successive iterates, one per iteration
    numvec increments;
};

inline constexpr double kRobustTolerance = 1e-6;

/**
 * Robust value iteration from the pessimistic start (min r)/(1-gamma), so the
 * iterates increase monotonically. Stops with a fixed-point residual of at
 * most `tol`.
 */
RobustSolution robust_value_iteration(const RobustProblem& problem, double tol = kRobustTolerance);

/// Worst-case distribution for every pair under value function `v`.
std::vector<numvec> worst_case_kernel(const ValueFunction& v, const RobustProblem& problem);

// ---------------------------------------------------------------------------

enum class Estimator { BCI, Hoeffding, Bernstein };

std::string to_string(Estimator estimator);

/// One entry of the method matrix.
struct MethodSpec {
    Estimator estimator = Estimator::BCI;
    NormKind norm = NormKind::L1Weighted;
    bool weighted = false;

    /// Sizing routine used for this method; throws for unsupported
    /// combinations (Bernstein with LInf).
    BudgetMethod budget_method() const;
    /// e.g. "BCI/L1/weighted"
    std::string label() const;

    bool operator==(const MethodSpec&) const = default;
};

enum class ZSource { RobustUnweighted, Nominal };

struct PipelineConfig {
    ZSource z_source = ZSource::RobustUnweighted;
    /// Number of z -> weights -> budgets -> solve passes for weighted methods.
    std::size_t weight_refinement_rounds = 1;
    /// Keep the budgets sized for uniform weights when switching to optimized ones.
    bool reuse_unweighted_psi = false;
    /// Restrict every set to the successors observed for its pair; weights
    /// are then computed from z on that support.
    bool restrict_support = true;
    BudgetOptions budget;
    double tol = kRobustTolerance;
    std::uint64_t posterior_seed = 0;
};

struct PipelineReport {
    ValueFunction value;
    Policy policy;
    double guaranteed_return = 0.0;
    std::size_t iterations = 0;
    std::vector<BudgetResult> per_sa_budgets;
    std::vector<numvec> weights_used;

    double psi_mean() const;
};

/**
 * Estimate -> weights -> budgets -> robust solve.
 *
 * Unweighted methods size sets for uniform weights 1/sqrt(S) (S counting the
 * support when sets are restricted) and solve once.
 * Weighted methods first solve that unweighted problem (or the nominal MDP,
 * per z_source) to obtain z, then per pair compute optimal weights from z,
 * resize the sets for those weights and solve again. The guaranteed return
 * is initial' v of the final robust value function.
 */
PipelineReport run_weighted_pipeline(const SampleStats& stats, const TabularMdp& skeleton,
                                     const MethodSpec& method, double delta,
                                     const PipelineConfig& config = {});

/// Single Bellman update with a known value function: one uncertain pair
/// whose samples are in stats pair (0,0).
struct SingleUpdateReport {
    double guaranteed_value = 0.0;
    BudgetResult budget;
    numvec weights;
};

SingleUpdateReport single_update_guarantee(const SampleStats& stats, const ValueFunction& values,
                                           const MethodSpec& method, double delta,
                                           const PipelineConfig& config = {});

struct SweepRow {
    MethodSpec method;
    double confidence = 0.0;
    std::size_t trial = 0;
    double guaranteed_return = 0.0;
    double psi_mean = 0.0;
    std::int64_t wallclock_ms = 0;
};

/// Result of one (method, confidence, trial) cell.
struct CellResult {
    double guaranteed_return = 0.0;
    double psi_mean = 0.0;
};

using CellFunction =
    std::function<CellResult(const MethodSpec&, double confidence, std::size_t trial)>;

/**
 * Evaluates every (method, confidence, trial) cell on `jobs` worker threads
 * and returns the rows in (method, confidence, trial) order. The first
 * exception thrown by a cell is rethrown after all workers stop.
 */
std::vector<SweepRow> run_cells(const std::vector<MethodSpec>& methods,
                                const std::vector<double>& confidences, std::size_t trials,
                                const CellFunction& cell, std::size_t jobs = 1,
                                bool record_wallclock = false);

/**
 * Runs the pipeline for every (method, confidence, trial). Trial t uses the
 * dataset produced by `dataset(t)` and posterior seed derive_seed(seed, {t}).
 * Rows come back in (method, confidence, trial) order.
 */
std::vector<SweepRow> guaranteed_return_sweep(
    const std::function<SampleStats(std::size_t)>& dataset, const TabularMdp& skeleton,
    const std::vector<MethodSpec>& methods, const std::vector<double>& confidences,
    std::size_t trials, std::uint64_t seed, const PipelineConfig& config = {},
    std::size_t jobs = 1);

/// Fixed-dataset form: only the posterior stream changes between trials.
std::vector<SweepRow> guaranteed_return_sweep(const SampleStats& stats, const TabularMdp& skeleton,
                                              const std::vector<MethodSpec>& methods,
                                              const std::vector<double>& confidences,
                                              std::size_t trials, std::uint64_t seed,
                                              const PipelineConfig& config = {},
                                              std::size_t jobs = 1);

} // namespace rambig
