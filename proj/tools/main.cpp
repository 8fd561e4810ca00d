#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spibb/bounds.hpp"
#include "spibb/data.hpp"
#include "spibb/environments.hpp"
#include "spibb/experiment.hpp"
#include "spibb/mdp_io.hpp"
#include "spibb/two_successor.hpp"
#include "spibb/value_iteration.hpp"

namespace {

using namespace spibb;

// Dense random MDP used by `transform verify --seed-random`.
TabularMdp random_dense_mdp(std::mt19937_64& rng, int max_states, int max_actions) {
    std::uniform_int_distribution<int> states(2, max_states), actions(1, max_actions);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int n = states(rng), k = actions(rng);
    TabularMdp m = TabularMdp::with_shape(n, k);
    m.default_discount = 0.9 + 0.09 * unit(rng);
    m.r_max = 1.0;
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < k; ++a) {
            SparseRow row;
            double total = 0.0;
            for (int t = 0; t < n; ++t) {
                double w = 0.05 + unit(rng);
                row.push_back({t, w});
                total += w;
            }
            for (SuccessorEntry& e : row) e.prob /= total;
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < row.size(); ++i) sum += row[i].prob;
            row.back().prob = 1.0 - sum;
            m.transitions[s][a] = std::move(row);
            m.rewards[s][a] = 2.0 * unit(rng) - 1.0;
        }
    m.validate();
    return m;
}

int cmd_bounds(const std::string& sweep, std::int64_t states, std::int64_t actions,
               double v_max, double gamma, double delta, double zeta,
               std::int64_t n_spibb_given, const std::string& out_path) {
    BoundParams params{states, actions, v_max, gamma, delta, 0.0};
    if (!sweep.empty()) {
        long long lo, hi, step;
        if (std::sscanf(sweep.c_str(), "%lld:%lld:%lld", &lo, &hi, &step) != 3) {
            std::cerr << "--sweep-states expects lo:hi:step\n";
            return 2;
        }
        std::ostringstream csv;
        csv << "states,n_spi,n_spibb,n_2s,n_beta\n";
        for (const SweepRow& row : sweep_states(params, zeta, lo, hi, step))
            csv << row.states << ',' << row.n_spi << ',' << row.n_spibb << ','
                << row.n_2s << ',' << row.n_beta << '\n';
        if (out_path.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            out << csv.str();
        }
        return 0;
    }
    if (n_spibb_given > 0) {
        std::cout << "n_spibb " << n_spibb_given << "\n"
                  << "n_2s " << convert_nmin(params, n_spibb_given, BoundKind::TwoSuccessor)
                  << "\n"
                  << "n_beta " << convert_nmin(params, n_spibb_given, BoundKind::Beta)
                  << "\n";
        return 0;
    }
    std::cout << "n_spi " << nmin_spi(params, zeta) << "\n"
              << "n_spibb " << nmin_spibb(params, zeta) << "\n"
              << "n_2s " << nmin_2s(params, zeta) << "\n"
              << "n_beta " << nmin_beta(params, zeta) << "\n";
    return 0;
}

int cmd_transform_verify(const std::string& mdp_path, int seed_random, double tol) {
    double worst_prob = 0.0, worst_perf = 0.0;
    auto check = [&](const TabularMdp& m, const std::string& label) {
        TwoSuccessorMdp t = transform_mdp(m);
        PreservationReport r = verify_preservation(m, t, StochasticPolicy::uniform(m));
        worst_prob = std::max(worst_prob, r.max_prob_gap);
        worst_perf = std::max(worst_perf, r.perf_gap);
        std::cout << label << ": states " << m.n_states << " -> " << t.mdp.n_states
                  << ", prob gap " << r.max_prob_gap << ", perf gap " << r.perf_gap
                  << "\n";
    };
    if (!mdp_path.empty()) check(read_mdp_file(mdp_path), mdp_path);
    if (seed_random > 0) {
        std::mt19937_64 rng(20240202);
        for (int i = 0; i < seed_random; ++i)
            check(random_dense_mdp(rng, 8, 3), "random " + std::to_string(i));
    }
    bool ok = worst_prob <= tol && worst_perf <= tol;
    std::cout << (ok ? "preservation OK" : "PRESERVATION VIOLATED") << " (tol " << tol
              << ")\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe policy improvement toolkit: bound calculators, two-successor "
                 "transforms, benchmark environments, and the experiment harness"};
    app.require_subcommand(1);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Evaluate sample-size bounds");
    std::int64_t states = 25, actions = 4, n_spibb_given = 0;
    double v_max = 1.0, gamma = 0.95, delta = 0.1, zeta = 0.1, tol = 1e-9;
    std::string sweep, out_path, config_path, in_path, name, mdp_path, map_path;
    bounds->add_option("--states", states, "Number of states");
    bounds->add_option("--actions", actions, "Number of actions");
    bounds->add_option("--vmax", v_max, "Value bound");
    bounds->add_option("--gamma", gamma, "Discount factor");
    bounds->add_option("--delta", delta, "Failure probability");
    bounds->add_option("--zeta", zeta, "Admissible performance loss");
    bounds->add_option("--n-spibb", n_spibb_given,
                       "Convert this threshold instead of inverting zeta");
    bounds->add_option("--sweep-states", sweep, "Emit CSV over lo:hi:step state counts");
    bounds->add_option("--out", out_path, "Write CSV here instead of stdout");

    // env build / behavior
    auto* env = app.add_subcommand("env", "Benchmark environments");
    auto* env_build = env->add_subcommand("build", "Write an environment as an MDP file");
    std::string spec_path, behavior_kind = "softmax_q", behavior_out;
    std::vector<std::string> param_overrides;
    env_build->add_option("name", name, "gridworld | wet_chicken | resource_gathering")
        ->required();
    env_build->add_option("--out", out_path, "Output MDP path")->required();
    env_build->add_option("--spec", spec_path, "Environment spec file");
    env_build->add_option("--param", param_overrides, "key=value override");
    auto* env_behavior =
        env->add_subcommand("behavior", "Write a behavior policy for an environment");
    std::int64_t q_steps = 50000;
    double lr = 0.25, temp = 0.12, epsilon = 1e-5;
    std::uint64_t seed = 42;
    env_behavior->add_option("name", name, "environment name")->required();
    env_behavior->add_option("--out", behavior_out, "Output policy path")->required();
    env_behavior->add_option("--spec", spec_path, "Environment spec file");
    env_behavior->add_option("--kind", behavior_kind, "softmax_q | perturbed_optimal");
    env_behavior->add_option("--q-steps", q_steps, "Q-learning steps");
    env_behavior->add_option("--lr", lr, "Q-learning rate");
    env_behavior->add_option("--temp", temp, "Softmax temperature");
    env_behavior->add_option("--seed", seed, "RNG seed");
    env_behavior->add_option("--epsilon", epsilon, "Non-optimal action probability");

    // transform
    auto* transform = app.add_subcommand("transform", "Two-successor transform tools");
    auto* tf_verify = transform->add_subcommand("verify", "Check preservation gaps");
    int seed_random = 0;
    tf_verify->add_option("--mdp", mdp_path, "MDP file to verify");
    tf_verify->add_option("--seed-random", seed_random, "Also verify n random MDPs");
    tf_verify->add_option("--tol", tol, "Gap tolerance");
    auto* tf_apply = transform->add_subcommand("apply", "Write the transformed MDP");
    tf_apply->add_option("--mdp", mdp_path, "Input MDP file")->required();
    tf_apply->add_option("--out", out_path, "Output MDP path")->required();
    tf_apply->add_option("--map", map_path, "Auxiliary-state sidecar path")->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Benchmark experiment harness");
    auto* exp_run = experiment->add_subcommand("run", "Run a configured experiment");
    int workers_override = 0;
    std::string out_dir_override;
    exp_run->add_option("--config", config_path, "Experiment config file")->required();
    exp_run->add_option("--workers", workers_override, "Override worker count");
    exp_run->add_option("--out-dir", out_dir_override, "Override output directory");
    auto* exp_plot = experiment->add_subcommand("plot", "Render plots from a summary CSV");
    exp_plot->add_option("--in", in_path, "summary.csv path")->required();
    exp_plot->add_option("--out-dir", out_dir_override, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed())
            return cmd_bounds(sweep, states, actions, v_max, gamma, delta, zeta,
                              n_spibb_given, out_path);

        if (env_build->parsed() || env_behavior->parsed()) {
            EnvSpec spec =
                spec_path.empty() ? default_env_spec(name) : read_env_spec_file(spec_path);
            if (!spec_path.empty() && spec.name != name)
                throw InvalidParametersError("spec file is for environment " + spec.name);
            for (const std::string& kv : param_overrides) {
                std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw InvalidParametersError("--param expects key=value");
                spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            }
            TabularMdp m = build_env(spec);
            if (env_build->parsed()) {
                write_mdp_file(out_path, m);
                std::cout << "wrote " << out_path << " (" << m.n_states << " states, "
                          << m.n_actions << " actions)\n";
            } else {
                StochasticPolicy pi =
                    behavior_kind == "perturbed_optimal"
                        ? behavior_perturbed_optimal(m, epsilon)
                        : behavior_softmax_q(m, q_steps, lr, temp, seed);
                write_policy_file(behavior_out, pi);
                std::cout << "wrote " << behavior_out << " (performance "
                          << performance(m, pi) << ")\n";
            }
            return 0;
        }

        if (tf_verify->parsed()) return cmd_transform_verify(mdp_path, seed_random, tol);

        if (tf_apply->parsed()) {
            TwoSuccessorMdp t = transform_mdp(read_mdp_file(mdp_path));
            write_two_successor(out_path, map_path, t);
            std::cout << "wrote " << out_path << " and " << map_path << " ("
                      << t.mdp.n_states - t.n_main << " auxiliary states)\n";
            return 0;
        }

        if (exp_run->parsed()) {
            ExperimentConfig cfg = parse_experiment_config_file(config_path);
            if (workers_override > 0) cfg.workers = workers_override;
            if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
            ExperimentContext ctx = prepare_experiment(cfg);
            std::cout << "env " << cfg.env.name << ": " << ctx.env.n_states
                      << " states, behavior perf " << ctx.rho_behavior
                      << ", optimal perf " << ctx.rho_optimal << "\n"
                      << "thresholds: spibb " << cfg.n_spibb << ", 2s " << ctx.n_2s
                      << ", beta " << ctx.n_beta << "\n";
            std::vector<RunResult> results = run_experiment(cfg, ctx);
            std::vector<SummaryRow> summary = aggregate(results, cfg.env.name);
            emit_outputs(summary, results, cfg.env.name, cfg.out_dir, ctx.rho_behavior,
                         ctx.rho_optimal);
            std::int64_t failed = 0;
            for (const RunResult& r : results) failed += r.status != "ok";
            std::cout << "wrote " << cfg.out_dir << "/raw.csv, summary.csv, "
                      << cfg.env.name << ".svg (" << results.size() << " rows, "
                      << failed << " failed)\n";
            return failed == 0 ? 0 : 1;
        }

        if (exp_plot->parsed()) {
            std::ifstream in(in_path);
            if (!in) throw IoError("cannot open: " + in_path);
            std::vector<SummaryRow> summary = read_summary_csv(in);
            if (summary.empty()) throw InvalidInputError("summary has no rows");
            // Reference levels from the summary itself when present.
            double rho_b = 0.0, rho_star = 0.0;
            for (const SummaryRow& r : summary) {
                if (r.method == "behavior") rho_b = r.mean;
                if (r.method == "optimal") rho_star = r.mean;
            }
            std::string dir = out_dir_override.empty() ? "." : out_dir_override;
            std::string env_name = summary.front().env;
            std::filesystem::create_directories(dir);
            std::string path = dir + "/" + env_name + ".svg";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot open for writing: " + path);
            out << render_svg(summary, env_name, rho_b, rho_star);
            std::cout << "wrote " << path << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
