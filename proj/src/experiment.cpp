#include "rambig/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"

namespace rambig {

namespace {

const std::set<std::string> kDomainKeys{"discount",       "states",       "levels",
                                        "growth_rate",    "control_effect", "control_cost",
                                        "noise_sd",       "noise_points", "initial_level"};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void key_error(const std::string& key, const std::string& message) {
    throw std::invalid_argument("key '" + key + "': " + message);
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        return csv::parse_index(value);
    } catch (const std::exception&) {
        key_error(key, "expected a nonnegative integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        const double x = csv::parse_double(value);
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        return x;
    } catch (const std::exception&) {
        key_error(key, "expected a real number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    const auto v = lower(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    key_error(key, "expected true or false, got '" + value + "'");
}

std::vector<std::string> parse_list(const std::string& value) {
    std::vector<std::string> items;
    for (auto& item : csv::split(value))
        if (!item.empty()) items.push_back(item);
    return items;
}

std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += (i ? ", " : "") + csv::format_double(xs[i]);
    return out;
}

const char* norm_name(NormKind norm) { return norm == NormKind::L1Weighted ? "L1" : "LInf"; }

} // namespace

MethodSpec parse_method(const std::string& text) {
    const auto parts = csv::split(lower(text), ':');
    if (parts.size() != 3)
        throw std::invalid_argument("method '" + text + "' must look like estimator:norm:weighting");
    MethodSpec m;
    if (parts[0] == "bci") m.estimator = Estimator::BCI;
    else if (parts[0] == "hoeffding") m.estimator = Estimator::Hoeffding;
    else if (parts[0] == "bernstein") m.estimator = Estimator::Bernstein;
    else throw std::invalid_argument("method '" + text + "': unknown estimator '" + parts[0] + "'");
    if (parts[1] == "l1") m.norm = NormKind::L1Weighted;
    else if (parts[1] == "linf") m.norm = NormKind::LInfWeighted;
    else throw std::invalid_argument("method '" + text + "': unknown norm '" + parts[1] + "'");
    if (parts[2] == "weighted") m.weighted = true;
    else if (parts[2] == "unweighted") m.weighted = false;
    else
        throw std::invalid_argument("method '" + text + "': expected weighted or unweighted, got '" +
                                    parts[2] + "'");
    m.budget_method();
    return m;
}

std::string format_method(const MethodSpec& m) {
    return lower(to_string(m.estimator)) + ":" + lower(norm_name(m.norm)) + ":" +
           (m.weighted ? "weighted" : "unweighted");
}

std::string config_schema() {
    return R"(Config file: one `key = value` per line, `#` starts a comment, lists are comma separated.
  domain                    single_bellman | riverswim | inventory | population (required)
  methods                   list of estimator:norm:weighting (required), e.g.
                            bci:l1:weighted, hoeffding:linf:unweighted, bernstein:l1:weighted
  confidences               list of reals in (0,1)            [0.5, 0.95]
  samples_per_sa            integer >= 1                      [100]
  posterior_draws           integer >= 1                      [10000]
  trials                    integer >= 1                      [100]
  seed                      integer                           [0]
  output_dir                path                              [results]
  jobs                      worker threads >= 1               [1]
  z_source                  robust | nominal                  [robust]
  weight_refinement_rounds  integer >= 1                      [1]
  reuse_unweighted_psi      bool                              [false]
  strengthen_l1             bool                              [true]
  tolerance                 real > 0                          [1e-06]
  record_wallclock          bool (nonzero wallclock_ms breaks byte-identical output) [false]
  discount                  real in [0,1)                     [0.95]
  values                    single_bellman: 5 terminal values [1, 2, 3, 4, 5]
  states                    inventory: stock levels >= 2      [10]
  levels, growth_rate, control_effect, control_cost, noise_sd, noise_points, initial_level
                            population model                  [20, 1.3, 0.5, 10, 0.2, 9, 10]
)";
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = csv::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(number) +
                                        ": expected key = value");
        const std::string key = lower(csv::trim(line.substr(0, eq)));
        const std::string value = csv::trim(line.substr(eq + 1));
        try {
            if (!seen.insert(key).second) key_error(key, "given more than once");
            if (key == "domain") {
                try {
                    c.domain = parse_domain_kind(value);
                } catch (const std::exception& e) {
                    key_error(key, e.what());
                }
            } else if (key == "methods") {
                c.methods.clear();
                for (const auto& item : parse_list(value)) {
                    try {
                        c.methods.push_back(parse_method(item));
                    } catch (const std::exception& e) {
                        key_error(key, e.what());
                    }
                }
            } else if (key == "confidences") {
                c.confidences.clear();
                for (const auto& item : parse_list(value)) c.confidences.push_back(parse_real(key, item));
            } else if (key == "values") {
                c.values.clear();
                for (const auto& item : parse_list(value)) c.values.push_back(parse_real(key, item));
            } else if (kDomainKeys.count(key)) {
                c.domain_params[key] = parse_real(key, value);
            } else if (key == "samples_per_sa") {
                c.samples_per_sa = parse_uint(key, value);
            } else if (key == "posterior_draws") {
                c.posterior_draws = parse_uint(key, value);
            } else if (key == "trials") {
                c.trials = parse_uint(key, value);
            } else if (key == "seed") {
                c.seed = parse_uint(key, value);
            } else if (key == "output_dir") {
                if (value.empty()) key_error(key, "expected a path");
                c.output_dir = value;
            } else if (key == "jobs") {
                c.jobs = parse_uint(key, value);
            } else if (key == "z_source") {
                const auto v = lower(value);
                if (v == "robust") c.z_source = ZSource::RobustUnweighted;
                else if (v == "nominal") c.z_source = ZSource::Nominal;
                else key_error(key, "expected robust or nominal, got '" + value + "'");
            } else if (key == "weight_refinement_rounds") {
                c.weight_refinement_rounds = parse_uint(key, value);
            } else if (key == "reuse_unweighted_psi") {
                c.reuse_unweighted_psi = parse_bool(key, value);
            } else if (key == "strengthen_l1") {
                c.strengthen_l1 = parse_bool(key, value);
            } else if (key == "tolerance") {
                c.tolerance = parse_real(key, value);
            } else if (key == "record_wallclock") {
                c.record_wallclock = parse_bool(key, value);
            } else {
                key_error(key, "unknown key");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (!seen.count("domain")) key_error("domain", "required");
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) key_error("methods", "at least one method is required");
    for (std::size_t i = 0; i < methods.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (methods[i] == methods[j])
                key_error("methods", "'" + format_method(methods[i]) + "' listed twice");
    if (confidences.empty()) key_error("confidences", "at least one confidence is required");
    for (double c : confidences)
        if (!(c > 0.0 && c < 1.0))
            key_error("confidences", "values must lie strictly in (0,1), got " + csv::format_double(c));
    if (samples_per_sa == 0) key_error("samples_per_sa", "must be at least 1");
    if (posterior_draws == 0) key_error("posterior_draws", "must be at least 1");
    if (trials == 0) key_error("trials", "must be at least 1");
    if (jobs == 0) key_error("jobs", "must be at least 1");
    if (weight_refinement_rounds == 0) key_error("weight_refinement_rounds", "must be at least 1");
    if (!(tolerance > 0.0)) key_error("tolerance", "must be positive");
    if (auto it = domain_params.find("discount");
        it != domain_params.end() && !(it->second >= 0.0 && it->second < 1.0))
        key_error("discount", "must lie in [0,1)");
    if (domain != DomainKind::SingleBellman && !values.empty())
        key_error("values", "only applies to domain single_bellman");
    if (domain == DomainKind::SingleBellman && !values.empty() && values.size() != 5)
        key_error("values", "expected exactly 5 terminal values");
    for (const auto& [name, value] : domain_params) {
        try {
            rambig::make_domain(domain, {{name, value}});
        } catch (const std::exception& e) {
            key_error(name, e.what());
        }
    }
    try {
        make_domain();
    } catch (const std::exception& e) {
        key_error("domain", e.what());
    }
}

std::string ExperimentConfig::describe() const {
    std::ostringstream out;
    out << "domain = " << to_string(domain) << '\n';
    const auto spec = make_domain();
    for (const auto& [name, value] : spec.params)
        out << name << " = " << csv::format_double(value) << '\n';
    if (domain == DomainKind::SingleBellman) out << "values = " << format_list(spec.terminal_values) << '\n';
    out << "methods = ";
    for (std::size_t i = 0; i < methods.size(); ++i) out << (i ? ", " : "") << format_method(methods[i]);
    out << '\n'
        << "confidences = " << format_list(confidences) << '\n'
        << "samples_per_sa = " << samples_per_sa << '\n'
        << "posterior_draws = " << posterior_draws << '\n'
        << "trials = " << trials << '\n'
        << "seed = " << seed << '\n'
        << "output_dir = " << output_dir.string() << '\n'
        << "jobs = " << jobs << '\n'
        << "z_source = " << (z_source == ZSource::Nominal ? "nominal" : "robust") << '\n'
        << "weight_refinement_rounds = " << weight_refinement_rounds << '\n'
        << "reuse_unweighted_psi = " << (reuse_unweighted_psi ? "true" : "false") << '\n'
        << "strengthen_l1 = " << (strengthen_l1 ? "true" : "false") << '\n'
        << "tolerance = " << csv::format_double(tolerance) << '\n'
        << "record_wallclock = " << (record_wallclock ? "true" : "false") << '\n';
    return out.str();
}

DomainSpec ExperimentConfig::make_domain() const {
    return rambig::make_domain(domain, domain_params, values);
}

PipelineConfig ExperimentConfig::pipeline() const {
    PipelineConfig p;
    p.z_source = z_source;
    p.weight_refinement_rounds = weight_refinement_rounds;
    p.reuse_unweighted_psi = reuse_unweighted_psi;
    p.budget.posterior_draws = posterior_draws;
    p.budget.strengthen_l1 = strengthen_l1;
    p.tol = tolerance;
    return p;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    auto config = parse_config(text.str());
    config.validate();
    return config;
}

std::uint64_t dataset_seed(std::uint64_t seed, std::size_t trial) {
    return derive_seed(seed, {0, trial});
}

std::uint64_t posterior_seed(std::uint64_t seed, std::size_t trial) {
    return derive_seed(seed, {1, trial});
}

std::vector<ResultRow> experiment_rows(const ExperimentConfig& config) {
    config.validate();
    const DomainSpec spec = config.make_domain();
    const PipelineConfig base = config.pipeline();
    const bool single = spec.kind == DomainKind::SingleBellman;

    std::vector<SampleStats> data;
    data.reserve(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
        auto stats = simulate_dataset(spec, config.samples_per_sa, dataset_seed(config.seed, t));
        data.push_back(single ? decision_samples(stats) : std::move(stats));
    }

    auto cell = [&](const MethodSpec& method, double confidence, std::size_t trial) {
        PipelineConfig p = base;
        p.posterior_seed = posterior_seed(config.seed, trial);
        if (single) {
            const auto r =
                single_update_guarantee(data[trial], spec.terminal_values, method, 1.0 - confidence, p);
            return CellResult{r.guaranteed_value, r.budget.psi};
        }
        const auto r = run_weighted_pipeline(data[trial], spec.true_mdp, method, 1.0 - confidence, p);
        return CellResult{r.guaranteed_return, r.psi_mean()};
    };
    return run_cells(config.methods, config.confidences, config.trials, cell, config.jobs,
                     config.record_wallclock);
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kResultsHeader << '\n';
    for (const auto& r : rows)
        out << to_string(r.method.estimator) << ',' << norm_name(r.method.norm) << ','
            << (r.method.weighted ? "true" : "false") << ',' << csv::format_double(r.confidence)
            << ',' << r.trial << ',' << csv::format_double(r.guaranteed_return) << ','
            << csv::format_double(r.psi_mean) << ',' << r.wallclock_ms << '\n';
    if (!out) throw std::runtime_error("error writing " + path.string());
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::vector<SummaryRow> summary;
    std::vector<std::vector<double>> samples;
    for (const auto& r : rows) {
        auto it = std::find_if(summary.begin(), summary.end(), [&](const SummaryRow& s) {
            return s.method == r.method && s.confidence == r.confidence;
        });
        if (it == summary.end()) {
            summary.push_back({r.method, r.confidence});
            samples.emplace_back();
            it = summary.end() - 1;
        }
        samples[static_cast<std::size_t>(it - summary.begin())].push_back(r.guaranteed_return);
    }
    for (std::size_t i = 0; i < summary.size(); ++i) {
        const auto& xs = samples[i];
        auto& s = summary[i];
        s.trials = xs.size();
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean = sum / static_cast<double>(xs.size());
        s.min = *std::min_element(xs.begin(), xs.end());
        s.max = *std::max_element(xs.begin(), xs.end());
        if (xs.size() > 1) {
            double ss = 0.0;
            for (double x : xs) ss += (x - s.mean) * (x - s.mean);
            const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
            s.std_error = sd / std::sqrt(static_cast<double>(xs.size()));
        }
        // the running sum can land a rounding step outside the sample range
        s.mean = std::clamp(s.mean, s.min, s.max);
    }
    return summary;
}

void write_summary_csv(const std::vector<SummaryRow>& summary, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "method,norm,weighted,confidence,trials,mean,std_error,min,max\n";
    for (const auto& s : summary)
        out << to_string(s.method.estimator) << ',' << norm_name(s.method.norm) << ','
            << (s.method.weighted ? "true" : "false") << ',' << csv::format_double(s.confidence)
            << ',' << s.trials << ',' << csv::format_double(s.mean) << ','
            << csv::format_double(s.std_error) << ',' << csv::format_double(s.min) << ','
            << csv::format_double(s.max) << '\n';
    if (!out) throw std::runtime_error("error writing " + path.string());
}

std::filesystem::path run_experiment(const ExperimentConfig& config) {
    const auto rows = experiment_rows(config);
    std::filesystem::create_directories(config.output_dir);
    const auto results = config.output_dir / "results.csv";
    write_results_csv(rows, results);
    write_summary_csv(summarize(rows), config.output_dir / "summary.csv");
    return results;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results " + path.string());
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != kResultsHeader)
        throw std::invalid_argument(path.string() + " line 1: expected header " + kResultsHeader);
    std::vector<ResultRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        line = csv::trim(line);
        if (line.empty()) continue;
        try {
            const auto f = csv::split(line);
            if (f.size() != 8) throw std::invalid_argument("expected 8 fields");
            ResultRow r;
            const auto weighted = lower(f[2]);
            if (weighted != "true" && weighted != "false")
                throw std::invalid_argument("weighted must be true or false");
            r.method = parse_method(f[0] + ":" + f[1] + ":" +
                                    (weighted == "true" ? "weighted" : "unweighted"));
            r.confidence = csv::parse_double(f[3]);
            r.trial = csv::parse_index(f[4]);
            r.guaranteed_return = csv::parse_double(f[5]);
            r.psi_mean = csv::parse_double(f[6]);
            r.wallclock_ms = static_cast<std::int64_t>(csv::parse_index(f[7]));
            rows.push_back(r);
        } catch (const std::exception& e) {
            throw std::invalid_argument(path.string() + " line " + std::to_string(number) + ": " +
                                        e.what());
        }
    }
    return rows;
}

std::filesystem::path emit_plot_data(const std::filesystem::path& results,
                                     const std::filesystem::path& out) {
    auto summary = summarize(read_results_csv(results));
    std::vector<MethodSpec> order;
    for (const auto& s : summary)
        if (std::find(order.begin(), order.end(), s.method) == order.end()) order.push_back(s.method);
    std::stable_sort(summary.begin(), summary.end(), [&](const SummaryRow& a, const SummaryRow& b) {
        const auto ia = std::find(order.begin(), order.end(), a.method) - order.begin();
        const auto ib = std::find(order.begin(), order.end(), b.method) - order.begin();
        return ia != ib ? ia < ib : a.confidence < b.confidence;
    });
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + out.string());
    file << "series,method,norm,weighted,confidence,mean,std_error,trials\n";
    for (const auto& s : summary)
        file << s.method.label() << ',' << to_string(s.method.estimator) << ','
             << norm_name(s.method.norm) << ',' << (s.method.weighted ? "true" : "false") << ','
             << csv::format_double(s.confidence) << ',' << csv::format_double(s.mean) << ','
             << csv::format_double(s.std_error) << ',' << s.trials << '\n';
    return out;
}

} // namespace rambig
