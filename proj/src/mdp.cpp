#include "rambig/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "csv.hpp"

namespace rambig {

void check_distribution(const numvec& p, const std::string& what, double tol) {
    if (p.empty()) throw std::invalid_argument(what + ": empty distribution");
    double total = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0)
            throw std::invalid_argument(what + ": entries must be finite and nonnegative");
        total += x;
    }
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument(what + ": entries sum to " + std::to_string(total) +
                                    ", not 1");
}

TabularMdp::TabularMdp(std::size_t states, std::size_t actions, numvec rewards,
                       std::vector<numvec> kernel, double discount, numvec initial)
    : states_(states), actions_(actions), rewards_(std::move(rewards)),
      kernel_(std::move(kernel)), discount_(discount), initial_(std::move(initial)) {
    if (states_ == 0 || actions_ == 0)
        throw std::invalid_argument("TabularMdp: need at least one state and one action");
    if (rewards_.size() != pairs())
        throw std::invalid_argument("TabularMdp: rewards must have states*actions entries");
    if (kernel_.size() != pairs())
        throw std::invalid_argument("TabularMdp: kernel must have states*actions rows");
    if (!(discount_ >= 0.0 && discount_ < 1.0))
        throw std::invalid_argument("TabularMdp: discount must lie in [0,1)");
    if (initial_.size() != states_)
        throw std::invalid_argument("TabularMdp: initial distribution has wrong length");
    for (double r : rewards_)
        if (!std::isfinite(r)) throw std::invalid_argument("TabularMdp: rewards must be finite");
    for (std::size_t s = 0; s < states_; ++s) {
        for (std::size_t a = 0; a < actions_; ++a) {
            const auto& p = kernel_[index(s, a)];
            if (p.size() != states_)
                throw std::invalid_argument("TabularMdp: kernel row has wrong length");
            check_distribution(p, "TabularMdp: kernel row (" + std::to_string(s) + "," +
                                      std::to_string(a) + ")");
        }
    }
    check_distribution(initial_, "TabularMdp: initial distribution");
}

TabularMdp TabularMdp::with_kernel(std::vector<numvec> kernel) const {
    return {states_, actions_, rewards_, std::move(kernel), discount_, initial_};
}

void check_policy(const TabularMdp& mdp, const Policy& policy) {
    if (policy.action_of.size() != mdp.states())
        throw std::invalid_argument("policy length does not match the number of states");
    for (auto a : policy.action_of)
        if (a >= mdp.actions()) throw std::invalid_argument("policy action out of range");
}

double stopping_threshold(double discount, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (discount <= 0.0) return std::numeric_limits<double>::infinity();
    return tol * (1.0 - discount) / discount;
}

namespace {

double q_value(const TabularMdp& mdp, const ValueFunction& v, std::size_t s, std::size_t a) {
    const auto& p = mdp.row(s, a);
    return mdp.reward(s, a) +
           mdp.discount() * std::inner_product(p.begin(), p.end(), v.begin(), 0.0);
}

// returns (best value, best action) with lowest-index tie-break
std::pair<double, std::size_t> best_action(const TabularMdp& mdp, const ValueFunction& v,
                                           std::size_t s) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < mdp.actions(); ++a) {
        double q = q_value(mdp, v, s, a);
        if (q > best) {
            best = q;
            best_a = a;
        }
    }
    return {best, best_a};
}

double max_abs_diff(const numvec& x, const numvec& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

} // namespace

std::pair<ValueFunction, Policy> value_iteration(const TabularMdp& mdp, double tol) {
    const double threshold = stopping_threshold(mdp.discount(), tol);
    ValueFunction v(mdp.states(), 0.0), next(mdp.states());
    while (true) {
        for (std::size_t s = 0; s < mdp.states(); ++s) next[s] = best_action(mdp, v, s).first;
        double diff = max_abs_diff(next, v);
        std::swap(v, next);
        if (diff <= threshold) break;
    }
    Policy policy = greedy_policy(mdp, v);
    return {std::move(v), std::move(policy)};
}

Policy greedy_policy(const TabularMdp& mdp, const ValueFunction& v) {
    Policy policy{std::vector<std::size_t>(mdp.states())};
    for (std::size_t s = 0; s < mdp.states(); ++s) policy.action_of[s] = best_action(mdp, v, s).second;
    return policy;
}

double bellman_residual(const TabularMdp& mdp, const ValueFunction& v) {
    double residual = 0.0;
    for (std::size_t s = 0; s < mdp.states(); ++s)
        residual = std::max(residual, std::abs(best_action(mdp, v, s).first - v[s]));
    return residual;
}

ValueFunction evaluate_policy(const TabularMdp& mdp, const Policy& policy, double tol) {
    check_policy(mdp, policy);
    const double threshold = stopping_threshold(mdp.discount(), tol);
    ValueFunction v(mdp.states(), 0.0), next(mdp.states());
    while (true) {
        for (std::size_t s = 0; s < mdp.states(); ++s)
            next[s] = q_value(mdp, v, s, policy.action_of[s]);
        double diff = max_abs_diff(next, v);
        std::swap(v, next);
        if (diff <= threshold) break;
    }
    return v;
}

double evaluate_return(const TabularMdp& mdp, const Policy& policy, double tol) {
    ValueFunction v = evaluate_policy(mdp, policy, tol);
    return std::inner_product(v.begin(), v.end(), mdp.initial().begin(), 0.0);
}

// ---------------------------------------------------------------------------
// sample statistics

SampleStats::SampleStats(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), counts_(states * actions * states, 0),
      totals_(states * actions, 0) {
    if (states == 0 || actions == 0)
        throw std::invalid_argument("SampleStats: need at least one state and one action");
}

void SampleStats::add(std::size_t from, std::size_t action, std::size_t to,
                      std::uint64_t count) {
    if (from >= states_ || to >= states_ || action >= actions_)
        throw std::out_of_range("SampleStats: transition index out of range");
    counts_[index(from, action) * states_ + to] += count;
    totals_[index(from, action)] += count;
}

std::vector<std::uint64_t> SampleStats::counts(std::size_t s, std::size_t a) const {
    auto first = counts_.begin() + static_cast<std::ptrdiff_t>(index(s, a) * states_);
    return {first, first + static_cast<std::ptrdiff_t>(states_)};
}

numvec SampleStats::empirical(std::size_t s, std::size_t a) const {
    const auto total = n(s, a);
    if (total == 0)
        throw InsufficientData("no samples for state " + std::to_string(s) + ", action " +
                               std::to_string(a));
    numvec p(states_);
    for (std::size_t t = 0; t < states_; ++t)
        p[t] = static_cast<double>(count(s, a, t)) / static_cast<double>(total);
    return p;
}

bool SampleStats::covers_all() const {
    return std::all_of(totals_.begin(), totals_.end(), [](auto t) { return t > 0; });
}

SampleStats empirical_from_samples(const std::vector<Transition>& transitions,
                                   std::size_t states, std::size_t actions) {
    std::size_t max_state = 0, max_action = 0;
    for (const auto& t : transitions) {
        max_state = std::max({max_state, t.from, t.to});
        max_action = std::max(max_action, t.action);
    }
    if (states == 0) states = transitions.empty() ? 1 : max_state + 1;
    if (actions == 0) actions = transitions.empty() ? 1 : max_action + 1;
    SampleStats stats(states, actions);
    for (const auto& t : transitions) stats.add(t.from, t.action, t.to);
    return stats;
}

SampleStats read_dataset_csv(const std::filesystem::path& path, std::size_t states,
                             std::size_t actions) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset " + path.string() + " is empty");
    const auto header = csv::split(csv::trim(line));
    bool aggregated;
    if (header == std::vector<std::string>{"state_from", "action", "state_to"})
        aggregated = false;
    else if (header == std::vector<std::string>{"state_from", "action", "state_to", "count"})
        aggregated = true;
    else
        throw std::runtime_error("dataset " + path.string() + ": unexpected header '" + line + "'");

    struct Row {
        std::size_t from, action, to;
        std::uint64_t count;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = csv::trim(line);
        if (line.empty()) continue;
        const auto fields = csv::split(line);
        if (fields.size() != header.size())
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) + " fields");
        try {
            Row r{csv::parse_index(fields[0]), csv::parse_index(fields[1]),
                  csv::parse_index(fields[2]), aggregated ? csv::parse_index(fields[3]) : 1};
            rows.push_back(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    std::size_t max_state = 0, max_action = 0;
    for (const auto& r : rows) {
        max_state = std::max({max_state, r.from, r.to});
        max_action = std::max(max_action, r.action);
    }
    if (states == 0) states = max_state + 1;
    if (actions == 0) actions = max_action + 1;
    SampleStats stats(states, actions);
    for (const auto& r : rows) stats.add(r.from, r.action, r.to, r.count);
    return stats;
}

void write_dataset_csv(const SampleStats& stats, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "state_from,action,state_to,count\n";
    for (std::size_t s = 0; s < stats.states(); ++s)
        for (std::size_t a = 0; a < stats.actions(); ++a)
            for (std::size_t t = 0; t < stats.states(); ++t)
                if (auto c = stats.count(s, a, t); c > 0)
                    out << s << ',' << a << ',' << t << ',' << c << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_mdp_csv(const TabularMdp& mdp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "state_from,action,state_to,probability,reward\n";
    for (std::size_t s = 0; s < mdp.states(); ++s)
        for (std::size_t a = 0; a < mdp.actions(); ++a)
            for (std::size_t t = 0; t < mdp.states(); ++t)
                if (double p = mdp.row(s, a)[t]; p > 0.0)
                    out << s << ',' << a << ',' << t << ',' << csv::format_double(p) << ','
                        << csv::format_double(mdp.reward(s, a)) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace rambig
