#include "rambig/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rambig/lp.hpp"

namespace rambig {

std::string to_string(NormKind norm) {
    return norm == NormKind::L1Weighted ? "L1" : "LInf";
}

double weighted_norm(const numvec& x, const numvec& weights, NormKind norm) {
    double result = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double term = weights[i] * std::abs(x[i]);
        result = norm == NormKind::L1Weighted ? result + term : std::max(result, term);
    }
    return result;
}

double weighted_distance(const numvec& x, const numvec& y, const numvec& weights,
                         NormKind norm) {
    double result = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double term = weights[i] * std::abs(x[i] - y[i]);
        result = norm == NormKind::L1Weighted ? result + term : std::max(result, term);
    }
    return result;
}

void AmbiguitySet::validate() const {
    if (nominal.empty()) throw std::invalid_argument("AmbiguitySet: empty nominal");
    if (weights.size() != nominal.size())
        throw std::invalid_argument("AmbiguitySet: weights and nominal differ in length");
    for (double w : weights)
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("AmbiguitySet: weights must be positive and finite");
    if (!(budget >= 0.0) || !std::isfinite(budget))
        throw std::invalid_argument("AmbiguitySet: budget must be nonnegative and finite");
    check_distribution(nominal, "AmbiguitySet: nominal");
    if (support.empty()) return;
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k] >= nominal.size() || (k > 0 && support[k] <= support[k - 1]))
            throw std::invalid_argument("AmbiguitySet: support must be increasing state indices");
    }
    double outside = 1.0;
    for (std::size_t i : support) outside -= nominal[i];
    if (outside > kSimplexTol)
        throw std::invalid_argument("AmbiguitySet: nominal has mass outside the support");
}

AmbiguitySet AmbiguitySet::uniform(NormKind norm, numvec nominal, double budget, double weight) {
    const auto n = nominal.size();
    return {norm, numvec(n, weight), budget, std::move(nominal), {}};
}

namespace {

double dot(const numvec& x, const numvec& y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

void check_inputs(const ValueFunction& z, const AmbiguitySet& set) {
    set.validate();
    if (z.size() != set.nominal.size())
        throw std::invalid_argument("worst case: value function and nominal differ in length");
    for (double x : z)
        if (!std::isfinite(x)) throw std::invalid_argument("worst case: value function not finite");
}

bool feasible(const numvec& p, const AmbiguitySet& set) {
    double total = 0.0;
    for (double x : p) {
        if (x < -1e-12) return false;
        total += x;
    }
    return std::abs(total - 1.0) <= 1e-10 &&
           weighted_distance(p, set.nominal, set.weights, set.norm) <= set.budget + 1e-10;
}

// z and set compacted to the support, which the copy no longer carries
std::pair<numvec, AmbiguitySet> on_support(const ValueFunction& z, const AmbiguitySet& set) {
    numvec zs;
    AmbiguitySet compact{set.norm, {}, set.budget, {}, {}};
    for (std::size_t i : set.support) {
        zs.push_back(z[i]);
        compact.weights.push_back(set.weights[i]);
        compact.nominal.push_back(set.nominal[i]);
    }
    // renormalize away rounding left by zeros outside the support
    double total = 0.0;
    for (double p : compact.nominal) total += p;
    for (double& p : compact.nominal) p /= total;
    return {std::move(zs), std::move(compact)};
}

template <class Solver>
WorstCase solve_on_support(const ValueFunction& z, const AmbiguitySet& set, Solver solver) {
    const auto [zs, compact] = on_support(z, set);
    WorstCase small = solver(zs, compact);
    numvec p(z.size(), 0.0);
    for (std::size_t k = 0; k < set.support.size(); ++k) p[set.support[k]] = small.argmin[k];
    return {small.value, std::move(p)};
}

// Minimizer of z'p + mu ||p - nominal||_{1,w} over the simplex for a fixed
// multiplier mu > 0. The cheapest receiver j minimizes z_j + mu w_j and every
// state whose z_i - mu w_i exceeds that price gives away all of its mass.
struct LagrangianStep {
    numvec p;
    double budget_used = 0.0;
};

LagrangianStep lagrangian_minimizer(const numvec& z, const numvec& nominal, const numvec& w,
                                    double mu) {
    const std::size_t n = z.size();
    std::size_t receiver = 0;
    double price = z[0] + mu * w[0];
    for (std::size_t j = 1; j < n; ++j) {
        const double c = z[j] + mu * w[j];
        if (c < price) {
            price = c;
            receiver = j;
        }
    }
    LagrangianStep step{nominal, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        if (i == receiver || nominal[i] <= 0.0) continue;
        if (z[i] - mu * w[i] > price) {
            step.p[receiver] += nominal[i];
            step.p[i] = 0.0;
            step.budget_used += nominal[i] * (w[i] + w[receiver]);
        }
    }
    return step;
}

} // namespace

WorstCase worst_case_l1w(const ValueFunction& z, const AmbiguitySet& set) {
    check_inputs(z, set);
    if (!set.support.empty()) return solve_on_support(z, set, worst_case_l1w);
    const auto& nominal = set.nominal;
    const auto& w = set.weights;
    const double psi = set.budget;
    const std::size_t n = z.size();

    if (psi == 0.0 || n == 1) return {dot(nominal, z), nominal};

    // Multipliers at which the Lagrangian minimizer changes: a donor becomes
    // profitable for a receiver, or two receivers swap prices.
    numvec knots;
    knots.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (z[i] > z[j]) knots.push_back((z[i] - z[j]) / (w[i] + w[j]));
            if (w[j] > w[i] && z[i] > z[j]) knots.push_back((z[i] - z[j]) / (w[j] - w[i]));
        }
    }
    std::sort(knots.begin(), knots.end(), std::greater<>());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    if (knots.empty()) return {dot(nominal, z), nominal};

    // one representative multiplier per interval between knots, decreasing
    numvec mids;
    mids.reserve(knots.size() + 1);
    mids.push_back(knots.front() * 2.0 + 1.0);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k)
        mids.push_back(0.5 * (knots[k] + knots[k + 1]));
    mids.push_back(0.5 * knots.back());

    // budget used is nondecreasing along `mids`; find the first interval
    // whose minimizer overshoots psi
    std::size_t lo = 0, hi = mids.size();
    std::vector<std::optional<LagrangianStep>> cache(mids.size());
    auto step_at = [&](std::size_t k) -> const LagrangianStep& {
        if (!cache[k]) cache[k] = lagrangian_minimizer(z, nominal, w, mids[k]);
        return *cache[k];
    };
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (step_at(mid).budget_used > psi)
            hi = mid;
        else
            lo = mid + 1;
    }

    numvec p;
    if (lo == mids.size()) {
        p = step_at(mids.size() - 1).p; // budget never binds
    } else {
        // lo >= 1 because the first interval moves no mass
        const auto& right = step_at(lo);
        const auto& left = step_at(lo - 1);
        const double theta = (right.budget_used - psi) / (right.budget_used - left.budget_used);
        p.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = std::max(0.0, theta * left.p[i] + (1.0 - theta) * right.p[i]);
    }

    if (!feasible(p, set)) return worst_case_lp(z, set);
    return {dot(p, z), std::move(p)};
}

WorstCase worst_case_linfw(const ValueFunction& z, const AmbiguitySet& set) {
    check_inputs(z, set);
    if (!set.support.empty()) return solve_on_support(z, set, worst_case_linfw);
    const auto& nominal = set.nominal;
    const std::size_t n = z.size();
    if (set.budget == 0.0) return {dot(nominal, z), nominal};

    numvec p(n), cap(n);
    double remaining = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = set.budget / set.weights[i];
        p[i] = std::max(0.0, nominal[i] - radius);
        cap[i] = std::min(1.0, nominal[i] + radius);
        remaining -= p[i];
    }
    // fill the lowest values first; stable sort keeps index order on ties
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    for (std::size_t i : order) {
        if (remaining <= 0.0) break;
        const double add = std::min(cap[i] - p[i], remaining);
        p[i] += add;
        remaining -= add;
    }

    if (!feasible(p, set)) return worst_case_lp(z, set);
    return {dot(p, z), std::move(p)};
}

WorstCase worst_case(const ValueFunction& z, const AmbiguitySet& set) {
    return set.norm == NormKind::L1Weighted ? worst_case_l1w(z, set) : worst_case_linfw(z, set);
}

WorstCase worst_case_lp(const ValueFunction& z, const AmbiguitySet& set) {
    check_inputs(z, set);
    if (!set.support.empty()) return solve_on_support(z, set, worst_case_lp);
    const std::size_t n = z.size();
    DenseLp lp;
    if (set.norm == NormKind::L1Weighted) {
        // variables: p (n), u (n) with u >= |p - nominal|
        lp.cost.assign(2 * n, 0.0);
        std::copy(z.begin(), z.end(), lp.cost.begin());
        numvec ones(2 * n, 0.0);
        std::fill(ones.begin(), ones.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
        lp.eq_rows.push_back(ones);
        lp.eq_rhs.push_back(1.0);
        for (std::size_t i = 0; i < n; ++i) {
            numvec up(2 * n, 0.0), down(2 * n, 0.0);
            up[i] = 1.0;
            up[n + i] = -1.0;
            down[i] = -1.0;
            down[n + i] = -1.0;
            lp.ub_rows.push_back(up);
            lp.ub_rhs.push_back(set.nominal[i]);
            lp.ub_rows.push_back(down);
            lp.ub_rhs.push_back(-set.nominal[i]);
        }
        numvec budget_row(2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) budget_row[n + i] = set.weights[i];
        lp.ub_rows.push_back(budget_row);
        lp.ub_rhs.push_back(set.budget);
    } else {
        lp.cost = z;
        lp.eq_rows.push_back(numvec(n, 1.0));
        lp.eq_rhs.push_back(1.0);
        for (std::size_t i = 0; i < n; ++i) {
            numvec row(n, 0.0);
            row[i] = 1.0;
            lp.ub_rows.push_back(row);
            lp.ub_rhs.push_back(set.nominal[i] + set.budget / set.weights[i]);
            row[i] = -1.0;
            lp.ub_rows.push_back(row);
            lp.ub_rhs.push_back(-(set.nominal[i] - set.budget / set.weights[i]));
        }
    }
    const auto sol = solve_dense_lp(lp);
    if (sol.status != LpSolution::Status::Optimal)
        throw std::runtime_error("worst case LP did not reach an optimal solution");
    numvec p(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    return {dot(p, z), std::move(p)};
}

double span_seminorm(const ValueFunction& z) {
    if (z.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    return *hi - *lo;
}

double lower_median(const ValueFunction& z) {
    if (z.empty()) throw std::invalid_argument("median of an empty vector");
    numvec sorted = z;
    const auto k = (sorted.size() - 1) / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    return sorted[k];
}

double DualShift::resolve(const ValueFunction& z) const {
    switch (kind) {
    case Kind::Midrange: {
        const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
        return 0.5 * (*lo + *hi);
    }
    case Kind::Median:
        return lower_median(z);
    case Kind::Fixed:
        return lambda;
    }
    return lambda;
}

double dual_norm_term(const ValueFunction& z, double lambda, NormKind norm,
                      const numvec& weights) {
    double result = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double term = std::abs(z[i] - lambda) / weights[i];
        // the dual of weighted L1 is weighted LInf and vice versa
        result = norm == NormKind::L1Weighted ? std::max(result, term) : result + term;
    }
    return result;
}

double dual_lower_bound(const ValueFunction& z, const AmbiguitySet& set, const DualShift& shift) {
    check_inputs(z, set);
    if (!set.support.empty()) {
        const auto [zs, compact] = on_support(z, set);
        return dual_lower_bound(zs, compact, shift);
    }
    const double lambda = shift.resolve(z);
    return dot(set.nominal, z) - set.budget * dual_norm_term(z, lambda, set.norm, set.weights);
}

double optimal_shift(const ValueFunction& z, NormKind norm, const numvec& weights) {
    if (z.empty() || z.size() != weights.size())
        throw std::invalid_argument("optimal_shift: size mismatch");
    const bool uniform = std::all_of(weights.begin(), weights.end(),
                                     [&](double w) { return w == weights.front(); });
    if (norm == NormKind::L1Weighted) {
        if (uniform) return DualShift::midrange().resolve(z);
        // max_i |z_i - lambda| / w_i is minimized where a falling line
        // (z_i - lambda)/w_i meets a rising one (lambda - z_j)/w_j
        double best_lambda = z.front();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < z.size(); ++i) {
            for (std::size_t j = i; j < z.size(); ++j) {
                const double lambda =
                    (z[i] * weights[j] + z[j] * weights[i]) / (weights[i] + weights[j]);
                const double value = dual_norm_term(z, lambda, norm, weights);
                if (value < best || (value == best && lambda < best_lambda)) {
                    best = value;
                    best_lambda = lambda;
                }
            }
        }
        return best_lambda;
    }
    if (uniform) return lower_median(z);
    // weighted lower median with weights 1/w_i
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    double total = 0.0;
    for (double w : weights) total += 1.0 / w;
    double cumulative = 0.0;
    for (std::size_t i : order) {
        cumulative += 1.0 / weights[i];
        if (cumulative >= 0.5 * total) return z[i];
    }
    return z[order.back()];
}

} // namespace rambig
