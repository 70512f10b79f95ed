#include "rambig/domains.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>

#include "rambig/random.hpp"

namespace rambig {

std::string to_string(DomainKind kind) {
    switch (kind) {
    case DomainKind::SingleBellman: return "single_bellman";
    case DomainKind::RiverSwim: return "riverswim";
    case DomainKind::Inventory: return "inventory";
    case DomainKind::Population: return "population";
    }
    return "?";
}

DomainKind parse_domain_kind(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto kind : {DomainKind::SingleBellman, DomainKind::RiverSwim, DomainKind::Inventory,
                      DomainKind::Population})
        if (lower == to_string(kind)) return kind;
    throw std::invalid_argument("unknown domain '" + name +
                                "' (expected single_bellman, riverswim, inventory or population)");
}

DomainSpec make_single_bellman(const ValueFunction& values, double discount) {
    if (values.size() != 5)
        throw std::invalid_argument("single Bellman domain needs exactly 5 terminal values");
    const std::size_t S = 6;
    numvec rewards(S, 0.0);
    std::vector<numvec> kernel(S, numvec(S, 0.0));
    for (std::size_t i = 1; i < S; ++i) {
        kernel[0][i] = 0.2;
        kernel[i][i] = 1.0;
        rewards[i] = (1.0 - discount) * values[i - 1];
    }
    numvec initial(S, 0.0);
    initial[0] = 1.0;
    return {DomainKind::SingleBellman,
            {{"discount", discount}},
            TabularMdp(S, 1, std::move(rewards), std::move(kernel), discount, std::move(initial)),
            values};
}

DomainSpec make_riverswim(double discount) {
    const std::size_t S = 6, A = 2;
    numvec rewards(S * A, 0.0);
    std::vector<numvec> kernel(S * A, numvec(S, 0.0));
    auto at = [&](std::size_t s, std::size_t a) -> numvec& { return kernel[s * A + a]; };
    for (std::size_t s = 0; s < S; ++s) at(s, 0)[s == 0 ? 0 : s - 1] = 1.0;
    rewards[0] = 5.0;

    at(0, 1)[0] = 0.7;
    at(0, 1)[1] = 0.3;
    for (std::size_t s = 1; s + 1 < S; ++s) {
        at(s, 1)[s - 1] = 0.1;
        at(s, 1)[s] = 0.6;
        at(s, 1)[s + 1] = 0.3;
    }
    at(S - 1, 1)[S - 1] = 0.3;
    at(S - 1, 1)[S - 2] = 0.7;
    rewards[(S - 1) * A + 1] = 0.3 * 10000.0;

    numvec initial(S, 0.0);
    initial[1] = initial[2] = 0.5;
    return {DomainKind::RiverSwim,
            {{"discount", discount}},
            TabularMdp(S, A, std::move(rewards), std::move(kernel), discount, std::move(initial)),
            {}};
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// inverse of normal_cdf by bisection; only used on a handful of grid points
double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DomainSpec make_inventory(std::size_t states, double discount) {
    if (states < 2) throw std::invalid_argument("inventory domain needs at least 2 states");
    const std::size_t S = states, A = states;
    const double mu = static_cast<double>(S) / 4.0;
    const double sd = static_cast<double>(S) / 6.0;
    const double price = 3.99, purchase = 2.49, holding = 0.03;

    numvec demand(S);
    for (std::size_t d = 0; d < S; ++d) {
        const double x = static_cast<double>(d);
        const double upper = d + 1 == S ? 1.0 : normal_cdf((x + 0.5 - mu) / sd);
        const double lower = d == 0 ? 0.0 : normal_cdf((x - 0.5 - mu) / sd);
        demand[d] = upper - lower;
    }
    double total = 0.0;
    for (double p : demand) total += p;
    for (double& p : demand) p /= total;

    numvec rewards(S * A, 0.0);
    std::vector<numvec> kernel(S * A, numvec(S, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t available = std::min(s + a, S - 1);
            double sales = 0.0;
            auto& row = kernel[s * A + a];
            for (std::size_t d = 0; d < S; ++d) {
                const std::size_t sold = std::min(available, d);
                sales += demand[d] * static_cast<double>(sold);
                row[available - sold] += demand[d];
            }
            rewards[s * A + a] = price * sales - purchase * static_cast<double>(a) -
                                 holding * static_cast<double>(s);
        }
    }
    numvec initial(S, 0.0);
    initial[0] = 1.0;
    return {DomainKind::Inventory,
            {{"states", static_cast<double>(S)}, {"discount", discount}},
            TabularMdp(S, A, std::move(rewards), std::move(kernel), discount, std::move(initial)),
            {}};
}

DomainSpec make_population(double growth_rate, double control_effect,
                           const PopulationCosts& costs, double discount) {
    const double controlled = growth_rate - control_effect;
    if (!(growth_rate > 0.0 && controlled > 0.0))
        throw std::invalid_argument("population: growth rates must stay positive");
    if (costs.levels < 2) throw std::invalid_argument("population: need at least 2 levels");
    if (costs.noise_points < 1) throw std::invalid_argument("population: need a noise point");
    if (costs.initial_level >= costs.levels)
        throw std::invalid_argument("population: initial level out of range");

    const std::size_t S = costs.levels, A = 2;
    const double top = static_cast<double>(S - 1);
    numvec noise(costs.noise_points);
    for (std::size_t k = 0; k < noise.size(); ++k)
        noise[k] = std::exp(costs.noise_sd *
                            normal_quantile((k + 0.5) / static_cast<double>(noise.size())));
    const double mass = 1.0 / static_cast<double>(noise.size());

    numvec rewards(S * A, 0.0);
    std::vector<numvec> kernel(S * A, numvec(S, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            auto& row = kernel[s * A + a];
            rewards[s * A + a] = -(static_cast<double>(s) + costs.control_cost * a);
            if (s == 0) {
                row[0] = 1.0;
                continue;
            }
            const double rate = a == 0 ? growth_rate : controlled;
            for (double eps : noise) {
                const double next = std::min(top, static_cast<double>(s) * rate * eps);
                const double low = std::floor(next);
                const double frac = next - low;
                const auto i = static_cast<std::size_t>(low);
                row[i] += mass * (1.0 - frac);
                if (frac > 0.0) row[i + 1] += mass * frac;
            }
            double total = 0.0;
            for (double p : row) total += p;
            for (double& p : row) p /= total;
        }
    }
    numvec initial(S, 0.0);
    initial[costs.initial_level] = 1.0;
    return {DomainKind::Population,
            {{"levels", static_cast<double>(S)},
             {"growth_rate", growth_rate},
             {"control_effect", control_effect},
             {"control_cost", costs.control_cost},
             {"noise_sd", costs.noise_sd},
             {"noise_points", static_cast<double>(costs.noise_points)},
             {"initial_level", static_cast<double>(costs.initial_level)},
             {"discount", discount}},
            TabularMdp(S, A, std::move(rewards), std::move(kernel), discount, std::move(initial)),
            {}};
}

namespace {

std::size_t as_count(const std::string& name, double x) {
    if (!(x >= 0.0) || x != std::floor(x))
        throw std::invalid_argument("domain parameter '" + name + "' must be a nonnegative integer");
    return static_cast<std::size_t>(x);
}

} // namespace

DomainSpec make_domain(DomainKind kind, const std::map<std::string, double>& params,
                       const ValueFunction& values) {
    std::set<std::string> allowed{"discount"};
    switch (kind) {
    case DomainKind::Inventory: allowed.insert("states"); break;
    case DomainKind::Population:
        allowed.insert({"levels", "growth_rate", "control_effect", "control_cost", "noise_sd",
                        "noise_points", "initial_level"});
        break;
    default: break;
    }
    for (const auto& [name, value] : params)
        if (!allowed.count(name))
            throw std::invalid_argument("parameter '" + name + "' does not apply to domain " +
                                        to_string(kind));
    auto get = [&](const std::string& name, double fallback) {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    };
    const double discount = get("discount", kDefaultDiscount);
    if (kind != DomainKind::SingleBellman && !values.empty())
        throw std::invalid_argument("terminal values only apply to domain single_bellman");

    switch (kind) {
    case DomainKind::SingleBellman:
        return make_single_bellman(values.empty() ? ValueFunction{1, 2, 3, 4, 5} : values, discount);
    case DomainKind::RiverSwim: return make_riverswim(discount);
    case DomainKind::Inventory:
        return make_inventory(as_count("states", get("states", 10)), discount);
    case DomainKind::Population: {
        PopulationCosts costs;
        costs.levels = as_count("levels", get("levels", costs.levels));
        costs.control_cost = get("control_cost", costs.control_cost);
        costs.noise_sd = get("noise_sd", costs.noise_sd);
        costs.noise_points = as_count("noise_points", get("noise_points", costs.noise_points));
        costs.initial_level = as_count("initial_level", get("initial_level", costs.initial_level));
        return make_population(get("growth_rate", 1.3), get("control_effect", 0.5), costs,
                               discount);
    }
    }
    throw std::invalid_argument("unknown domain");
}

SampleStats simulate_dataset(const DomainSpec& spec, std::size_t samples_per_sa,
                             std::uint64_t seed) {
    if (samples_per_sa == 0) throw std::invalid_argument("simulate: samples_per_sa must be >= 1");
    const auto& mdp = spec.true_mdp;
    SampleStats stats(mdp.states(), mdp.actions());
    for (std::size_t s = 0; s < mdp.states(); ++s) {
        for (std::size_t a = 0; a < mdp.actions(); ++a) {
            const numvec& row = mdp.row(s, a);
            numvec cdf(row.size());
            double acc = 0.0;
            std::size_t last = 0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                acc += row[j];
                cdf[j] = acc;
                if (row[j] > 0.0) last = j;
            }
            Engine engine(derive_seed(seed, {s, a}));
            std::vector<std::uint64_t> counts(row.size(), 0);
            for (std::size_t k = 0; k < samples_per_sa; ++k) {
                const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
                std::size_t j = static_cast<std::size_t>(
                    std::upper_bound(cdf.begin(), cdf.end(), u * acc) - cdf.begin());
                // never land on a zero-probability state through rounding
                j = std::min(j, last);
                while (row[j] == 0.0) ++j;
                ++counts[j];
            }
            for (std::size_t j = 0; j < row.size(); ++j)
                if (counts[j]) stats.add(s, a, j, counts[j]);
        }
    }
    return stats;
}

SampleStats decision_samples(const SampleStats& stats) {
    if (stats.states() != 6 || stats.actions() != 1)
        throw std::invalid_argument("decision_samples expects the single Bellman dataset");
    SampleStats out(5, 1);
    for (std::size_t j = 1; j < 6; ++j)
        if (auto c = stats.count(0, 0, j)) out.add(0, 0, j - 1, c);
    return out;
}

} // namespace rambig
