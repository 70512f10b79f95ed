#include "rambig/robust.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

namespace rambig {

void RobustProblem::validate() const {
    if (sets.size() != skeleton.pairs())
        throw std::invalid_argument("robust problem: expected one ambiguity set per pair");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& set = sets[i];
        set.validate();
        const auto& row = skeleton.kernel()[i];
        if (set.nominal.size() != row.size())
            throw std::invalid_argument("robust problem: set nominal has wrong length");
        for (std::size_t j = 0; j < row.size(); ++j)
            if (std::abs(set.nominal[j] - row[j]) > kSimplexTol)
                throw std::invalid_argument("robust problem: set nominal differs from kernel row " +
                                            std::to_string(i));
    }
}

std::pair<ValueFunction, Policy> robust_bellman_update(const ValueFunction& v,
                                                       const RobustProblem& problem) {
    const auto& mdp = problem.skeleton;
    if (v.size() != mdp.states()) throw std::invalid_argument("robust update: value has wrong length");
    ValueFunction out(mdp.states());
    Policy policy{std::vector<std::size_t>(mdp.states(), 0)};
    for (std::size_t s = 0; s < mdp.states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mdp.actions(); ++a) {
            const double q = mdp.reward(s, a) +
                             mdp.discount() * worst_case(v, problem.sets[mdp.index(s, a)]).value;
            if (q > best) {
                best = q;
                policy.action_of[s] = a;
            }
        }
        out[s] = best;
    }
    return {std::move(out), std::move(policy)};
}

RobustSolution robust_value_iteration(const RobustProblem& problem, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("robust value iteration: tol must be positive");
    problem.validate();
    const auto& mdp = problem.skeleton;
    const double gamma = mdp.discount();
    const double threshold = stopping_threshold(gamma, tol);
    const double rmin = *std::min_element(mdp.rewards().begin(), mdp.rewards().end());

    RobustSolution sol;
    sol.value.assign(mdp.states(), rmin / (1.0 - gamma));
    for (;;) {
        auto [next, policy] = robust_bellman_update(sol.value, problem);
        double diff = 0.0;
        for (std::size_t s = 0; s < next.size(); ++s)
            diff = std::max(diff, std::abs(next[s] - sol.value[s]));
        sol.value = std::move(next);
        sol.policy = std::move(policy);
        sol.increments.push_back(diff);
        ++sol.iterations;
        if (diff <= threshold || gamma == 0.0) break;
    }
    // greedy with respect to the returned values
    sol.policy = robust_bellman_update(sol.value, problem).second;
    return sol;
}

std::vector<numvec> worst_case_kernel(const ValueFunction& v, const RobustProblem& problem) {
    std::vector<numvec> kernel;
    kernel.reserve(problem.sets.size());
    for (const auto& set : problem.sets) kernel.push_back(worst_case(v, set).argmin);
    return kernel;
}

// ---------------------------------------------------------------------------

std::string to_string(Estimator estimator) {
    switch (estimator) {
    case Estimator::BCI: return "BCI";
    case Estimator::Hoeffding: return "Hoeffding";
    case Estimator::Bernstein: return "Bernstein";
    }
    return "?";
}

BudgetMethod MethodSpec::budget_method() const {
    switch (estimator) {
    case Estimator::BCI: return BudgetMethod::WBCI;
    case Estimator::Hoeffding:
        if (norm == NormKind::LInfWeighted) return BudgetMethod::HoeffdingLInfW;
        return weighted ? BudgetMethod::HoeffdingL1W : BudgetMethod::HoeffdingL1;
    case Estimator::Bernstein:
        if (norm == NormKind::LInfWeighted)
            throw std::invalid_argument("Bernstein sizing is only available for the L1 norm");
        return weighted ? BudgetMethod::BernsteinL1W : BudgetMethod::BernsteinL1;
    }
    throw std::invalid_argument("unknown estimator");
}

std::string MethodSpec::label() const {
    return to_string(estimator) + "/" + (norm == NormKind::L1Weighted ? "L1" : "LInf") + "/" +
           (weighted ? "weighted" : "unweighted");
}

double PipelineReport::psi_mean() const {
    if (per_sa_budgets.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& b : per_sa_budgets) sum += b.psi;
    return sum / static_cast<double>(per_sa_budgets.size());
}

namespace {

struct Sized {
    std::vector<BudgetResult> budgets;
    std::vector<numvec> weights;
};

std::vector<std::vector<std::size_t>> supports_of(const SampleStats& stats, bool restrict) {
    std::vector<std::vector<std::size_t>> out(stats.states() * stats.actions());
    if (!restrict) return out;
    for (std::size_t s = 0; s < stats.states(); ++s)
        for (std::size_t a = 0; a < stats.actions(); ++a)
            out[stats.index(s, a)] = observed_support(stats, s, a);
    return out;
}

// Weights for one pair: `make` receives z on the support (all of z when the
// support is empty) and returns weights for those states; entries off the
// support are never read and are set to one.
template <class Make>
numvec pair_weights(const ValueFunction& z, const std::vector<std::size_t>& support, Make make) {
    if (support.empty()) return make(z);
    ValueFunction zs;
    for (std::size_t j : support) zs.push_back(z[j]);
    const numvec ws = make(zs);
    numvec w(z.size(), 1.0);
    for (std::size_t k = 0; k < support.size(); ++k) w[support[k]] = ws[k];
    return w;
}

std::vector<numvec> uniform_pair_weights(std::size_t states,
                                         const std::vector<std::vector<std::size_t>>& supports) {
    std::vector<numvec> out;
    const ValueFunction dummy(states, 0.0);
    for (const auto& support : supports)
        out.push_back(pair_weights(dummy, support,
                                   [](const ValueFunction& zs) { return uniform_weights(zs.size()); }));
    return out;
}

std::vector<numvec> optimal_pair_weights(const ValueFunction& z, NormKind norm,
                                         const std::vector<std::vector<std::size_t>>& supports) {
    std::vector<numvec> out;
    for (const auto& support : supports)
        out.push_back(pair_weights(z, support, [&](const ValueFunction& zs) {
            return optimal_weights(zs, norm).weights;
        }));
    return out;
}

Sized size_sets(const SampleStats& stats, const MethodSpec& method, double delta,
                const std::vector<numvec>& weights, const PosteriorModel* posterior,
                const BudgetOptions& options) {
    const BudgetMethod bm = method.budget_method();
    Sized out;
    out.weights = weights;
    out.budgets.reserve(weights.size());
    for (std::size_t s = 0; s < stats.states(); ++s)
        for (std::size_t a = 0; a < stats.actions(); ++a)
            out.budgets.push_back(budget_for(stats, s, a, bm, method.norm, delta,
                                             weights[stats.index(s, a)], posterior, options));
    return out;
}

RobustProblem make_problem(const TabularMdp& skeleton, const Sized& sized) {
    std::vector<numvec> kernel;
    std::vector<AmbiguitySet> sets;
    for (std::size_t i = 0; i < sized.budgets.size(); ++i) {
        const auto& b = sized.budgets[i];
        kernel.push_back(b.nominal);
        sets.push_back(AmbiguitySet{b.norm, sized.weights[i], b.psi, b.nominal, b.support});
    }
    return {skeleton.with_kernel(std::move(kernel)), std::move(sets)};
}

PipelineReport report_from(const RobustProblem& problem, const RobustSolution& sol, Sized sized) {
    PipelineReport r;
    r.value = sol.value;
    r.policy = sol.policy;
    r.iterations = sol.iterations;
    const auto& init = problem.skeleton.initial();
    for (std::size_t s = 0; s < init.size(); ++s) r.guaranteed_return += init[s] * sol.value[s];
    r.per_sa_budgets = std::move(sized.budgets);
    r.weights_used = std::move(sized.weights);
    return r;
}

} // namespace

PipelineReport run_weighted_pipeline(const SampleStats& stats, const TabularMdp& skeleton,
                                     const MethodSpec& method, double delta,
                                     const PipelineConfig& config) {
    if (stats.states() != skeleton.states() || stats.actions() != skeleton.actions())
        throw std::invalid_argument("pipeline: dataset and skeleton dimensions differ");
    if (!stats.covers_all())
        throw InsufficientData("pipeline: every state-action pair needs at least one sample");

    std::optional<PosteriorModel> posterior;
    if (method.estimator == Estimator::BCI) posterior.emplace(stats, config.posterior_seed);
    const PosteriorModel* post = posterior ? &*posterior : nullptr;
    BudgetOptions options = config.budget;
    options.restrict_support = config.restrict_support;
    const auto supports = supports_of(stats, config.restrict_support);

    MethodSpec base = method;
    base.weighted = false;
    Sized sized = size_sets(stats, base, delta, uniform_pair_weights(skeleton.states(), supports),
                            post, options);
    RobustProblem problem = make_problem(skeleton, sized);

    if (!method.weighted || config.weight_refinement_rounds == 0) {
        const auto sol = robust_value_iteration(problem, config.tol);
        return report_from(problem, sol, std::move(sized));
    }

    ValueFunction z;
    if (config.z_source == ZSource::Nominal)
        z = value_iteration(problem.skeleton, config.tol).first;
    else
        z = robust_value_iteration(problem, config.tol).value;

    const Sized unweighted = sized;
    const NormKind norm = unweighted.budgets.front().norm;
    RobustSolution sol;
    for (std::size_t round = 0; round < config.weight_refinement_rounds; ++round) {
        const auto weights = optimal_pair_weights(z, norm, supports);
        if (config.reuse_unweighted_psi) {
            sized = unweighted;
            sized.weights = weights;
        } else {
            sized = size_sets(stats, method, delta, weights, post, options);
        }
        problem = make_problem(skeleton, sized);
        sol = robust_value_iteration(problem, config.tol);
        z = sol.value;
    }
    return report_from(problem, sol, std::move(sized));
}

SingleUpdateReport single_update_guarantee(const SampleStats& stats, const ValueFunction& values,
                                           const MethodSpec& method, double delta,
                                           const PipelineConfig& config) {
    if (values.size() != stats.states())
        throw std::invalid_argument("single update: value length differs from state count");
    if (stats.n(0, 0) == 0) throw InsufficientData("single update: no samples");
    std::optional<PosteriorModel> posterior;
    if (method.estimator == Estimator::BCI) posterior.emplace(stats, config.posterior_seed);

    BudgetOptions options = config.budget;
    options.pair_count = 1;
    options.restrict_support = config.restrict_support;
    const auto support = config.restrict_support ? observed_support(stats, 0, 0)
                                                 : std::vector<std::size_t>{};
    SingleUpdateReport r;
    r.weights = pair_weights(values, support, [&](const ValueFunction& zs) {
        return method.weighted ? optimal_weights(zs, method.norm).weights
                               : uniform_weights(zs.size());
    });
    r.budget = budget_for(stats, 0, 0, method.budget_method(), method.norm, delta, r.weights,
                          posterior ? &*posterior : nullptr, options);
    const AmbiguitySet set{r.budget.norm, r.weights, r.budget.psi, r.budget.nominal,
                           r.budget.support};
    r.guaranteed_value = worst_case(values, set).value;
    return r;
}

std::vector<SweepRow> run_cells(const std::vector<MethodSpec>& methods,
                                const std::vector<double>& confidences, std::size_t trials,
                                const CellFunction& cell, std::size_t jobs,
                                bool record_wallclock) {
    if (trials == 0) throw std::invalid_argument("sweep: trials must be at least 1");
    const std::size_t total = methods.size() * confidences.size() * trials;
    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            SweepRow& row = rows[k];
            row.trial = k % trials;
            row.confidence = confidences[(k / trials) % confidences.size()];
            row.method = methods[k / (trials * confidences.size())];
            try {
                const auto start = std::chrono::steady_clock::now();
                const CellResult res = cell(row.method, row.confidence, row.trial);
                row.guaranteed_return = res.guaranteed_return;
                row.psi_mean = res.psi_mean;
                if (record_wallclock)
                    row.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::steady_clock::now() - start)
                                           .count();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    jobs = std::max<std::size_t>(1, std::min(jobs, total));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<SweepRow> guaranteed_return_sweep(
    const std::function<SampleStats(std::size_t)>& dataset, const TabularMdp& skeleton,
    const std::vector<MethodSpec>& methods, const std::vector<double>& confidences,
    std::size_t trials, std::uint64_t seed, const PipelineConfig& config, std::size_t jobs) {
    if (trials == 0) throw std::invalid_argument("sweep: trials must be at least 1");
    std::vector<SampleStats> data;
    data.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) data.push_back(dataset(t));

    return run_cells(
        methods, confidences, trials,
        [&](const MethodSpec& method, double confidence, std::size_t trial) {
            PipelineConfig c = config;
            c.posterior_seed = derive_seed(seed, {trial});
            const auto report =
                run_weighted_pipeline(data[trial], skeleton, method, 1.0 - confidence, c);
            return CellResult{report.guaranteed_return, report.psi_mean()};
        },
        jobs);
}

std::vector<SweepRow> guaranteed_return_sweep(const SampleStats& stats, const TabularMdp& skeleton,
                                              const std::vector<MethodSpec>& methods,
                                              const std::vector<double>& confidences,
                                              std::size_t trials, std::uint64_t seed,
                                              const PipelineConfig& config, std::size_t jobs) {
    return guaranteed_return_sweep([&](std::size_t) { return stats; }, skeleton, methods,
                                   confidences, trials, seed, config, jobs);
}

} // namespace rambig
