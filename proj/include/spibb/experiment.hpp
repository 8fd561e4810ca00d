#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spibb/bounds.hpp"
#include "spibb/environments.hpp"
#include "spibb/mdp.hpp"

namespace spibb {

/// Stable 64-bit mix of (base seed, dataset size, run index), so any subset
/// of runs reproduces identical datasets regardless of execution order.
std::uint64_t run_seed(std::uint64_t base_seed, std::int64_t dataset_size, int run);

/// How the behavior policy is obtained.
struct BehaviorSpec {
    std::string kind = "softmax_q"; // softmax_q | perturbed_optimal | file
    std::int64_t q_steps = 50000;
    double lr = 0.25;
    double temp = 0.12;
    std::uint64_t seed = 42;
    double epsilon = 1e-5;
    std::string file;
};

struct ExperimentConfig {
    EnvSpec env;
    BehaviorSpec behavior;
    std::vector<std::string> methods = {"basic_rl", "spibb", "spibb_2s",
                                        "spibb_beta", "behavior", "optimal"};
    std::int64_t n_spibb = 100;
    double delta = 0.1;
    double v_max = 0.0; ///< <= 0 selects r_max / (1 - gamma)
    std::vector<std::int64_t> dataset_sizes;
    int repeats = 1000;
    std::uint64_t base_seed = 20240101;
    int episode_len = 200;
    std::string out_dir = "out";
    int workers = 1;

    void validate() const;
};

/// `key = value` lines under [experiment], [env], and [behavior] sections;
/// `#` comments. Keys match the field names.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config_file(const std::string& path);

struct RunResult {
    std::string method;
    std::int64_t n_wedge; // 0 for methods without a bootstrap threshold
    std::int64_t dataset_size;
    int run;
    std::uint64_t seed;
    std::string status; // "ok" or the failure reason
    double perf;        // on the true environment
};

/// Immutable context shared by all runs of one experiment.
struct ExperimentContext {
    TabularMdp env;
    StochasticPolicy pi_b;
    StochasticPolicy pi_star;
    double rho_behavior;
    double rho_optimal;
    double v_max;
    std::int64_t n_2s;
    std::int64_t n_beta;
};

/// Resolves the environment, behavior policy, and converted thresholds.
ExperimentContext prepare_experiment(const ExperimentConfig& cfg);

/// Runs the full grid: for each (dataset size, run) one dataset is sampled
/// and every configured method is solved on its estimated model and evaluated
/// on the true environment. Results are ordered by (method, size, run) and do
/// not depend on the worker count. Failed runs carry their reason in
/// `status` instead of being dropped.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg,
                                      const ExperimentContext& ctx);

/// Mean of the worst ceil(alpha * n) values. Throws EmptyInputError.
double cvar(std::vector<double> values, double alpha);

struct SummaryRow {
    std::string env;
    std::string method;
    std::int64_t dataset_size;
    double mean;
    double cvar10;
    double cvar1;
    std::int64_t n_runs;
};

/// Per-(method, size) statistics over runs with status "ok".
std::vector<SummaryRow> aggregate(const std::vector<RunResult>& results,
                                  const std::string& env_name);

/// Writes raw.csv, summary.csv, and one SVG plot per environment into
/// `out_dir`. Output bytes depend only on the inputs.
void emit_outputs(const std::vector<SummaryRow>& summary,
                  const std::vector<RunResult>& raw, const std::string& env_name,
                  const std::string& out_dir, double rho_behavior, double rho_optimal);

/// Renders the summary curves (mean solid, CVaRs dashed; one <path> triple
/// per method) with horizontal reference lines for the behavior and optimal
/// performance.
std::string render_svg(const std::vector<SummaryRow>& summary,
                       const std::string& env_name, double rho_behavior,
                       double rho_optimal);

std::string raw_csv(const std::vector<RunResult>& raw, const std::string& env_name);
std::string summary_csv(const std::vector<SummaryRow>& summary);

std::vector<SummaryRow> read_summary_csv(std::istream& in);

} // namespace spibb
