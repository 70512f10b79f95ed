#include "rambig/set_size.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rambig {

std::string to_string(BudgetMethod method) {
    switch (method) {
    case BudgetMethod::WBCI: return "WBCI";
    case BudgetMethod::HoeffdingL1: return "HoeffdingL1";
    case BudgetMethod::HoeffdingL1W: return "HoeffdingL1W";
    case BudgetMethod::HoeffdingLInfW: return "HoeffdingLInfW";
    case BudgetMethod::BernsteinL1: return "BernsteinL1";
    case BudgetMethod::BernsteinL1W: return "BernsteinL1W";
    }
    return "unknown";
}

namespace {

double clamp_probability(double x) { return std::clamp(x, 0.0, 1.0); }

void check_sorted(const numvec& weights) {
    if (weights.empty()) throw std::invalid_argument("tail bound: empty weights");
    for (std::size_t i = 0; i + 1 < weights.size(); ++i)
        if (weights[i] < weights[i + 1])
            throw std::invalid_argument("tail bound: weights must be sorted nonincreasing");
    if (!(weights.back() > 0.0)) throw std::invalid_argument("tail bound: weights must be positive");
}

void check_tail_args(double psi, std::uint64_t n) {
    if (!(psi >= 0.0)) throw std::invalid_argument("tail bound: psi must be nonnegative");
    if (n == 0) throw std::invalid_argument("tail bound: need at least one sample");
}

// 2^S - 2 without overflow concerns for realistic S
double subsets(std::size_t states) { return std::ldexp(1.0, static_cast<int>(states)) - 2.0; }

} // namespace

double hoeffding_l1_psi(std::uint64_t n, std::size_t states, std::size_t actions, double delta) {
    if (n == 0) throw std::invalid_argument("hoeffding_l1_psi: need at least one sample");
    if (!(delta > 0.0)) throw std::invalid_argument("hoeffding_l1_psi: delta must be positive");
    const double log_term =
        std::log(static_cast<double>(states) * static_cast<double>(actions)) +
        static_cast<double>(states) * std::log(2.0) - std::log(delta);
    if (log_term <= 0.0) return 0.0;
    return std::sqrt(2.0 / static_cast<double>(n) * log_term);
}

double hoeffding_l1_tail(double psi, std::uint64_t n, std::size_t states) {
    check_tail_args(psi, n);
    return clamp_probability(subsets(states) *
                             std::exp(-psi * psi * static_cast<double>(n) / 2.0));
}

double weighted_l1_tail(double psi, std::uint64_t n, const numvec& weights, bool strengthen) {
    check_tail_args(psi, n);
    check_sorted(weights);
    const std::size_t S = weights.size();
    double sum = 0.0;
    for (std::size_t i = 1; i < S; ++i) {
        const double w = weights[i - 1];
        sum += std::ldexp(1.0, static_cast<int>(S - i)) *
               std::exp(-psi * psi * static_cast<double>(n) / (2.0 * w * w));
    }
    return clamp_probability(strengthen ? sum : 2.0 * sum);
}

double weighted_linf_tail(double psi, std::uint64_t n, const numvec& weights) {
    check_tail_args(psi, n);
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("tail bound: weights must be positive");
        sum += std::exp(-2.0 * psi * psi * static_cast<double>(n) / (w * w));
    }
    return clamp_probability(2.0 * sum);
}

double bernstein_l1_tail(double psi, std::uint64_t n, std::size_t states) {
    check_tail_args(psi, n);
    return clamp_probability(subsets(states) *
                             std::exp(-3.0 * psi * psi * static_cast<double>(n) / (6.0 + 4.0 * psi)));
}

double bernstein_l1_tail(double psi, std::uint64_t n, const numvec& weights, bool strengthen) {
    check_tail_args(psi, n);
    check_sorted(weights);
    const std::size_t S = weights.size();
    double sum = 0.0;
    for (std::size_t i = 1; i < S; ++i) {
        const double w = weights[i - 1];
        sum += std::ldexp(1.0, static_cast<int>(S - i)) *
               std::exp(-3.0 * psi * psi * static_cast<double>(n) / (6.0 * w * w + 4.0 * psi * w));
    }
    return clamp_probability(strengthen ? sum : 2.0 * sum);
}

numvec sorted_nonincreasing(numvec weights) {
    std::sort(weights.begin(), weights.end(), std::greater<>());
    return weights;
}

double invert_tail_bound(const std::function<double(double)>& tail, double delta_target,
                         double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("invert_tail_bound: tol must be positive");
    if (!(delta_target > 0.0))
        throw std::invalid_argument("invert_tail_bound: target must be positive");
    if (tail(0.0) <= delta_target) return 0.0;
    constexpr double kLimit = 1e6;
    double lo = 0.0, hi = 2.0;
    while (tail(hi) > delta_target) {
        lo = hi;
        hi *= 2.0;
        if (hi > kLimit)
            throw std::runtime_error("invert_tail_bound: target not reachable for psi <= 1e6");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) <= delta_target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------

PosteriorModel::PosteriorModel(const SampleStats& stats, std::uint64_t seed)
    : states_(stats.states()), actions_(stats.actions()),
      concentration_(stats.states() * stats.actions()), seed_(seed) {
    for (std::size_t s = 0; s < states_; ++s) {
        for (std::size_t a = 0; a < actions_; ++a) {
            numvec alpha(states_, 0.0);
            for (std::size_t t = 0; t < states_; ++t) {
                const auto c = stats.count(s, a, t);
                if (c > 0) alpha[t] = 1.0 + static_cast<double>(c);
            }
            concentration_[stats.index(s, a)] = std::move(alpha);
        }
    }
}

PosteriorModel::PosteriorModel(const SampleStats& stats, std::vector<numvec> prior_alpha,
                               std::uint64_t seed)
    : states_(stats.states()), actions_(stats.actions()), concentration_(std::move(prior_alpha)),
      seed_(seed) {
    if (concentration_.size() != states_ * actions_)
        throw std::invalid_argument("PosteriorModel: one prior per state-action pair required");
    for (std::size_t s = 0; s < states_; ++s) {
        for (std::size_t a = 0; a < actions_; ++a) {
            auto& alpha = concentration_[stats.index(s, a)];
            if (alpha.size() != states_)
                throw std::invalid_argument("PosteriorModel: prior has wrong length");
            for (std::size_t t = 0; t < states_; ++t) {
                if (alpha[t] < 0.0 || !std::isfinite(alpha[t]))
                    throw std::invalid_argument("PosteriorModel: prior must be nonnegative");
                if (alpha[t] > 0.0) alpha[t] += static_cast<double>(stats.count(s, a, t));
                else if (stats.count(s, a, t) > 0)
                    throw std::invalid_argument("PosteriorModel: observed successor outside prior support");
            }
        }
    }
}

const numvec& PosteriorModel::concentration(std::size_t s, std::size_t a) const {
    const auto& alpha = concentration_.at(s * actions_ + a);
    if (std::none_of(alpha.begin(), alpha.end(), [](double x) { return x > 0.0; }))
        throw InsufficientData("posterior for state " + std::to_string(s) + ", action " +
                               std::to_string(a) + " has empty support");
    return alpha;
}

std::vector<numvec> sample_dirichlet(const numvec& alpha, std::size_t m, Engine& engine) {
    std::vector<std::gamma_distribution<double>> gammas;
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > 0.0) {
            support.push_back(i);
            gammas.emplace_back(alpha[i], 1.0);
        }
    }
    if (support.empty()) throw std::invalid_argument("sample_dirichlet: empty support");
    std::vector<numvec> draws(m, numvec(alpha.size(), 0.0));
    for (auto& x : draws) {
        if (support.size() == 1) {
            x[support.front()] = 1.0;
            continue;
        }
        double total = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            const double g = gammas[k](engine);
            x[support[k]] = g;
            total += g;
        }
        for (auto i : support) x[i] /= total;
    }
    return draws;
}

std::vector<numvec> sample_posterior(const PosteriorModel& posterior, std::size_t s,
                                     std::size_t a, std::size_t m) {
    if (m == 0) throw std::invalid_argument("sample_posterior: need at least one draw");
    Engine engine(derive_seed(posterior.seed(), {s, a}));
    return sample_dirichlet(posterior.concentration(s, a), m, engine);
}

std::size_t credible_index(double delta, std::size_t m) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("credible_index: delta must lie in (0, 1]");
    if (m == 0) throw std::invalid_argument("credible_index: need at least one draw");
    const double x = (1.0 - delta) * static_cast<double>(m);
    auto k = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
    return std::clamp<std::size_t>(k, 1, m);
}

BudgetResult wbci_from_draws(const std::vector<numvec>& draws, double delta,
                             const numvec& weights, NormKind norm) {
    if (draws.empty()) throw std::invalid_argument("wbci: need at least one draw");
    const std::size_t S = draws.front().size();
    if (weights.size() != S) throw std::invalid_argument("wbci: weights have wrong length");

    numvec nominal(S, 0.0);
    for (const auto& x : draws)
        for (std::size_t i = 0; i < S; ++i) nominal[i] += x[i];
    for (double& x : nominal) x /= static_cast<double>(draws.size());

    numvec distances(draws.size());
    for (std::size_t k = 0; k < draws.size(); ++k)
        distances[k] = weighted_distance(nominal, draws[k], weights, norm);
    const std::size_t index = credible_index(delta, draws.size()) - 1;
    std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(index),
                     distances.end());

    BudgetResult result;
    result.nominal = std::move(nominal);
    result.psi = distances[index];
    result.method = BudgetMethod::WBCI;
    result.norm = norm;
    result.delta_used = delta;
    return result;
}

BudgetResult wbci(const PosteriorModel& posterior, std::size_t s, std::size_t a, double delta,
                  std::size_t m, const numvec& weights, NormKind norm) {
    return wbci_from_draws(sample_posterior(posterior, s, a, m), delta, weights, norm);
}

namespace {

double common_weight(const numvec& weights, BudgetMethod method) {
    for (double w : weights)
        if (w != weights.front())
            throw std::invalid_argument(to_string(method) + " requires uniform weights");
    return weights.front();
}

} // namespace

std::vector<std::size_t> observed_support(const SampleStats& stats, std::size_t s,
                                          std::size_t a) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < stats.states(); ++j)
        if (stats.count(s, a, j) > 0) support.push_back(j);
    if (support.size() == stats.states()) support.clear();
    return support;
}

BudgetResult budget_for(const SampleStats& stats, std::size_t s, std::size_t a,
                        BudgetMethod method, NormKind norm, double delta_global,
                        const numvec& weights, const PosteriorModel* posterior,
                        const BudgetOptions& options, const std::vector<numvec>* draws) {
    if (!(delta_global > 0.0 && delta_global <= 1.0))
        throw std::invalid_argument("budget_for: delta must lie in (0, 1]");
    if (weights.size() != stats.states())
        throw std::invalid_argument("budget_for: weights have wrong length");
    const std::size_t pairs =
        options.pair_count ? options.pair_count : stats.states() * stats.actions();
    const double delta = delta_global / static_cast<double>(pairs);

    std::vector<std::size_t> support;
    if (options.restrict_support) {
        if (stats.n(s, a) == 0)
            throw InsufficientData("budget_for: no samples for the requested pair");
        support = observed_support(stats, s, a);
    }
    // weights on the states the set can use
    numvec w = weights;
    if (!support.empty()) {
        w.clear();
        for (std::size_t j : support) w.push_back(weights[j]);
    }
    const std::size_t S = w.size();

    if (method == BudgetMethod::WBCI) {
        // posterior draws vanish off the observed support, so distances over
        // all states equal distances over the support
        BudgetResult r;
        if (draws) {
            r = wbci_from_draws(*draws, delta, weights, norm);
        } else {
            if (!posterior) throw std::invalid_argument("budget_for: WBCI needs a posterior");
            r = wbci(*posterior, s, a, delta, options.posterior_draws, weights, norm);
        }
        r.support = std::move(support);
        return r;
    }

    BudgetResult r;
    r.nominal = stats.empirical(s, a);
    r.method = method;
    r.delta_used = delta;
    const auto n = stats.n(s, a);
    const double target = std::min(delta, 1.0);
    switch (method) {
    case BudgetMethod::HoeffdingL1:
        // the closed form is stated for unit weights; scale to the supplied
        // uniform weight so the set is unchanged
        r.norm = NormKind::L1Weighted;
        r.psi = common_weight(w, method) *
                hoeffding_l1_psi(n, S, 1, delta * static_cast<double>(S));
        break;
    case BudgetMethod::HoeffdingL1W: {
        r.norm = NormKind::L1Weighted;
        const numvec sorted = sorted_nonincreasing(w);
        r.psi = invert_tail_bound(
            [&](double psi) { return weighted_l1_tail(psi, n, sorted, options.strengthen_l1); },
            target, options.tol);
        break;
    }
    case BudgetMethod::HoeffdingLInfW:
        r.norm = NormKind::LInfWeighted;
        r.psi = invert_tail_bound([&](double psi) { return weighted_linf_tail(psi, n, w); },
                                  target, options.tol);
        break;
    case BudgetMethod::BernsteinL1: {
        r.norm = NormKind::L1Weighted;
        const double c = common_weight(w, method);
        r.psi = c * invert_tail_bound([&](double psi) { return bernstein_l1_tail(psi, n, S); },
                                      target, options.tol);
        break;
    }
    case BudgetMethod::BernsteinL1W: {
        r.norm = NormKind::L1Weighted;
        const numvec sorted = sorted_nonincreasing(w);
        r.psi = invert_tail_bound(
            [&](double psi) { return bernstein_l1_tail(psi, n, sorted, options.strengthen_l1); },
            target, options.tol);
        break;
    }
    case BudgetMethod::WBCI:
        break;
    }
    r.support = std::move(support);
    return r;
}

} // namespace rambig
