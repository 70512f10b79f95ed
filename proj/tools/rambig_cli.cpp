// rambig: robust MDP experiments with value-function weighted ambiguity sets.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "rambig/experiment.hpp"

namespace fs = std::filesystem;
using namespace rambig;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
};

// seed precedence: --seed, then RAMBIG_SEED, then the config file
ExperimentConfig load(const std::string& path, const Overrides& o) {
    ExperimentConfig config = validate_config(path);
    if (o.seed) {
        config.seed = *o.seed;
    } else if (const char* env = std::getenv("RAMBIG_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            config.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("RAMBIG_SEED: expected an integer, got '") +
                                        env + "'");
        }
    }
    if (o.trials) config.trials = *o.trials;
    if (o.jobs) config.jobs = *o.jobs;
    if (o.out) config.output_dir = *o.out;
    config.validate();
    return config;
}

void add_overrides(CLI::App* cmd, Overrides& o, bool output = true) {
    cmd->add_option("--seed", o.seed, "Master seed (overrides RAMBIG_SEED and the config)");
    cmd->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    if (output) cmd->add_option("--out", o.out, "Output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust MDPs with value-function weighted ambiguity sets.\n\n" +
                 config_schema()};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;

    auto* run = app.add_subcommand("run", "Run an experiment; writes results.csv, summary.csv and plotdata.csv");
    run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    add_overrides(run, o);

    std::string results_path, plot_out;
    auto* plot = app.add_subcommand("plot-data", "Aggregate results.csv into per-method plot series");
    plot->add_option("--results", results_path, "results.csv to aggregate")->required();
    plot->add_option("--out", plot_out, "Output CSV (default: plotdata.csv next to the results)");

    auto* validate = app.add_subcommand("validate", "Check a config and echo every resolved value");
    validate->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    add_overrides(validate, o);

    std::size_t trial = 0;
    bool with_mdp = false;
    auto* gen = app.add_subcommand("gen-dataset", "Simulate one trial's dataset");
    gen->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    gen->add_option("--trial", trial, "Trial index whose dataset stream is used");
    gen->add_flag("--mdp", with_mdp, "Also write the true MDP as mdp.csv");
    add_overrides(gen, o);

    std::string dataset_path;
    std::optional<double> confidence;
    auto* solve = app.add_subcommand("solve", "Run the pipeline once on a dataset for every configured method");
    solve->add_option("--config", config_path, "Experiment config (domain, methods, options)")->required()->check(CLI::ExistingFile);
    solve->add_option("--dataset", dataset_path, "Dataset CSV")->required()->check(CLI::ExistingFile);
    solve->add_option("--confidence", confidence, "Confidence level (default: first configured)");
    add_overrides(solve, o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto config = load(config_path, o);
            const auto results = run_experiment(config);
            const auto plotdata = emit_plot_data(results, config.output_dir / "plotdata.csv");
            std::cout << "wrote " << results.string() << ", "
                      << (config.output_dir / "summary.csv").string() << ", " << plotdata.string()
                      << '\n';
        } else if (*plot) {
            const fs::path out = plot_out.empty()
                                     ? fs::path(results_path).parent_path() / "plotdata.csv"
                                     : fs::path(plot_out);
            std::cout << "wrote " << emit_plot_data(results_path, out).string() << '\n';
        } else if (*validate) {
            std::cout << load(config_path, o).describe();
        } else if (*gen) {
            const auto config = load(config_path, o);
            const auto spec = config.make_domain();
            fs::create_directories(config.output_dir);
            const auto stats =
                simulate_dataset(spec, config.samples_per_sa, dataset_seed(config.seed, trial));
            write_dataset_csv(stats, config.output_dir / "dataset.csv");
            std::cout << "wrote " << (config.output_dir / "dataset.csv").string() << '\n';
            if (with_mdp) {
                write_mdp_csv(spec.true_mdp, config.output_dir / "mdp.csv");
                std::cout << "wrote " << (config.output_dir / "mdp.csv").string() << '\n';
            }
        } else if (*solve) {
            const auto config = load(config_path, o);
            const auto spec = config.make_domain();
            const double c = confidence.value_or(config.confidences.front());
            if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("--confidence must lie in (0,1)");
            const auto stats = read_dataset_csv(dataset_path, spec.true_mdp.states(),
                                                spec.true_mdp.actions());
            PipelineConfig p = config.pipeline();
            p.posterior_seed = posterior_seed(config.seed, 0);
            std::cout << "method,confidence,guaranteed_return,psi_mean,policy\n";
            for (const auto& method : config.methods) {
                std::string policy;
                double value, psi;
                if (spec.kind == DomainKind::SingleBellman) {
                    const auto r = single_update_guarantee(decision_samples(stats),
                                                           spec.terminal_values, method, 1.0 - c, p);
                    value = r.guaranteed_value;
                    psi = r.budget.psi;
                    policy = "0";
                } else {
                    const auto r = run_weighted_pipeline(stats, spec.true_mdp, method, 1.0 - c, p);
                    value = r.guaranteed_return;
                    psi = r.psi_mean();
                    for (std::size_t s = 0; s < r.policy.action_of.size(); ++s)
                        policy += (s ? " " : "") + std::to_string(r.policy.action_of[s]);
                }
                std::cout << format_method(method) << ',' << c << ',' << value << ',' << psi << ','
                          << policy << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
