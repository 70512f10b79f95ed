#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rambig/domains.hpp"
#include "rambig/robust.hpp"

namespace rambig {

/**
 * Fully resolved experiment configuration.
 *
 * Config files are flat `key = value` lines; `#` starts a comment and list
 * values are comma separated. Methods are written estimator:norm:weighting,
 * e.g. `bci:l1:weighted, hoeffding:linf:unweighted`.
 */
struct ExperimentConfig {
    DomainKind domain = DomainKind::RiverSwim;
    std::map<std::string, double> domain_params;
    ValueFunction values; ///< terminal values, single_bellman only
    std::vector<MethodSpec> methods;
    std::vector<double> confidences{0.5, 0.95};
    std::size_t samples_per_sa = 100;
    std::size_t posterior_draws = 10000;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "results";
    std::size_t jobs = 1;
    ZSource z_source = ZSource::RobustUnweighted;
    std::size_t weight_refinement_rounds = 1;
    bool reuse_unweighted_psi = false;
    bool strengthen_l1 = true;
    double tolerance = kRobustTolerance;
    bool record_wallclock = false;

    /// Checks every invariant; messages name the offending key.
    void validate() const;
    /// Every key with its resolved value, in config-file syntax.
    std::string describe() const;
    DomainSpec make_domain() const;
    PipelineConfig pipeline() const;
};

/// Key reference printed by `--help`.
std::string config_schema();

/// Parses config text; unknown keys and malformed values are rejected with
/// the key name (and line number) in the message.
ExperimentConfig parse_config(const std::string& text);

/// Reads, parses and validates a config file.
ExperimentConfig validate_config(const std::filesystem::path& path);

/// Parses `bci:l1:weighted` style method names.
MethodSpec parse_method(const std::string& text);
std::string format_method(const MethodSpec& method);

/// One row of results.csv.
using ResultRow = SweepRow;

inline constexpr const char* kResultsHeader =
    "method,norm,weighted,confidence,trial,guaranteed_return,psi_mean,wallclock_ms";

/// All cells of the experiment in (method, confidence, trial) order.
std::vector<ResultRow> experiment_rows(const ExperimentConfig& config);

/// Stream seeds: trial datasets and per-trial posterior draws.
std::uint64_t dataset_seed(std::uint64_t seed, std::size_t trial);
std::uint64_t posterior_seed(std::uint64_t seed, std::size_t trial);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

struct SummaryRow {
    MethodSpec method;
    double confidence = 0.0;
    std::size_t trials = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Groups rows by (method, confidence) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void write_summary_csv(const std::vector<SummaryRow>& summary, const std::filesystem::path& path);

/**
 * Runs the experiment and writes results.csv and summary.csv into
 * config.output_dir (created if needed). Returns the results path.
 */
std::filesystem::path run_experiment(const ExperimentConfig& config);

/// Reads results.csv; malformed rows are reported with their line number.
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/**
 * Per-method series of (confidence, mean, standard error) sorted by
 * confidence, written as `series,method,norm,weighted,confidence,mean,std_error,trials`.
 * The standard error is the sample SD divided by sqrt(trials).
 */
std::filesystem::path emit_plot_data(const std::filesystem::path& results,
                                     const std::filesystem::path& out);

} // namespace rambig
