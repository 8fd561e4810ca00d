#include "spibb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "spibb/data.hpp"
#include "spibb/mdp_io.hpp"
#include "spibb/spibb.hpp"
#include "spibb/value_iteration.hpp"

namespace spibb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t run_seed(std::uint64_t base_seed, std::int64_t dataset_size, int run) {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(dataset_size));
    return splitmix64(h ^ static_cast<std::uint64_t>(run));
}

void ExperimentConfig::validate() const {
    if (env.name.empty()) throw InvalidInputError("config: missing environment name");
    if (methods.empty()) throw InvalidInputError("config: no methods selected");
    if (repeats < 1) throw InvalidInputError("config: repeats must be >= 1");
    if (n_spibb < 1) throw InvalidInputError("config: n_spibb must be >= 1");
    if (episode_len < 1) throw InvalidInputError("config: episode_len must be >= 1");
    if (workers < 1) throw InvalidInputError("config: workers must be >= 1");
    if (dataset_sizes.empty())
        throw InvalidInputError("config: dataset_sizes must be non-empty");
    std::int64_t prev = 0;
    for (std::int64_t size : dataset_sizes) {
        if (size <= prev)
            throw InvalidInputError("config: dataset_sizes must be ascending and positive");
        prev = size;
    }
    static const std::vector<std::string> known = {"basic_rl", "spibb",   "spibb_2s",
                                                   "spibb_beta", "behavior", "optimal"};
    for (const std::string& m : methods)
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw InvalidInputError("config: unknown method " + m);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw IoError("config line " + std::to_string(line_no) + ": bad section");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (section == "env") {
            if (key == "name")
                cfg.env.name = value;
            else
                cfg.env.params[key] = std::stod(value);
        } else if (section == "behavior") {
            if (key == "kind") cfg.behavior.kind = value;
            else if (key == "q_steps") cfg.behavior.q_steps = std::stoll(value);
            else if (key == "lr") cfg.behavior.lr = std::stod(value);
            else if (key == "temp") cfg.behavior.temp = std::stod(value);
            else if (key == "seed") cfg.behavior.seed = std::stoull(value);
            else if (key == "epsilon") cfg.behavior.epsilon = std::stod(value);
            else if (key == "file") cfg.behavior.file = value;
            else throw IoError("config: unknown behavior key " + key);
        } else if (section == "experiment") {
            if (key == "methods") cfg.methods = split_list(value);
            else if (key == "n_spibb") cfg.n_spibb = std::stoll(value);
            else if (key == "delta") cfg.delta = std::stod(value);
            else if (key == "v_max") cfg.v_max = std::stod(value);
            else if (key == "repeats") cfg.repeats = std::stoi(value);
            else if (key == "base_seed") cfg.base_seed = std::stoull(value);
            else if (key == "episode_len") cfg.episode_len = std::stoi(value);
            else if (key == "out_dir") cfg.out_dir = value;
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "dataset_sizes") {
                cfg.dataset_sizes.clear();
                for (const std::string& item : split_list(value))
                    cfg.dataset_sizes.push_back(std::stoll(item));
            } else {
                throw IoError("config: unknown experiment key " + key);
            }
        } else {
            throw IoError("config: key outside of a known section: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return parse_experiment_config(in);
}

ExperimentContext prepare_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentContext ctx;
    ctx.env = build_env(cfg.env);

    const BehaviorSpec& b = cfg.behavior;
    if (b.kind == "softmax_q")
        ctx.pi_b = behavior_softmax_q(ctx.env, b.q_steps, b.lr, b.temp, b.seed);
    else if (b.kind == "perturbed_optimal")
        ctx.pi_b = behavior_perturbed_optimal(ctx.env, b.epsilon);
    else if (b.kind == "file")
        ctx.pi_b = read_policy_file(b.file, ctx.env.n_states, ctx.env.n_actions);
    else
        throw InvalidInputError("config: unknown behavior kind " + b.kind);
    ctx.pi_b.validate(ctx.env);

    ctx.pi_star = greedy_policy(ctx.env);
    ctx.rho_behavior = performance(ctx.env, ctx.pi_b);
    ctx.rho_optimal = performance(ctx.env, ctx.pi_star);
    ctx.v_max = cfg.v_max > 0.0 ? cfg.v_max
                                : ctx.env.r_max / (1.0 - ctx.env.default_discount);

    BoundParams params{ctx.env.n_states, ctx.env.n_actions, ctx.v_max,
                       ctx.env.default_discount, cfg.delta, 0.0};
    ctx.n_2s = convert_nmin(params, cfg.n_spibb, BoundKind::TwoSuccessor);
    ctx.n_beta = convert_nmin(params, cfg.n_spibb, BoundKind::Beta);
    return ctx;
}

namespace {

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s.empty() ? "error" : s;
}

} // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, prepare_experiment(cfg));
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg,
                                      const ExperimentContext& ctx) {
    const std::size_t n_sizes = cfg.dataset_sizes.size();
    const std::size_t n_runs = static_cast<std::size_t>(cfg.repeats);
    const std::size_t n_methods = cfg.methods.size();

    auto n_wedge_of = [&](const std::string& method) -> std::int64_t {
        if (method == "spibb") return cfg.n_spibb;
        if (method == "spibb_2s") return ctx.n_2s;
        if (method == "spibb_beta") return ctx.n_beta;
        return 0;
    };

    std::vector<RunResult> results(n_methods * n_sizes * n_runs);
    std::atomic<std::size_t> next_task{0};
    const std::size_t n_tasks = n_sizes * n_runs;

    auto worker = [&]() {
        for (;;) {
            std::size_t task = next_task.fetch_add(1);
            if (task >= n_tasks) return;
            std::size_t size_idx = task / n_runs;
            int run = static_cast<int>(task % n_runs);
            std::int64_t size = cfg.dataset_sizes[size_idx];
            std::uint64_t seed = run_seed(cfg.base_seed, size, run);

            TransitionCounts counts;
            TabularMdp mle;
            std::string dataset_status = "ok";
            try {
                std::vector<Trajectory> data =
                    sample_trajectories(ctx.env, ctx.pi_b, size, cfg.episode_len, seed);
                counts = count(data, ctx.env.n_states, ctx.env.n_actions);
                mle = build_mle_mdp(counts, ctx.env, RewardModel::Known);
            } catch (const std::exception& e) {
                dataset_status = sanitize_status(e.what());
            }

            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                const std::string& method = cfg.methods[mi];
                RunResult& slot =
                    results[(mi * n_sizes + size_idx) * n_runs + static_cast<std::size_t>(run)];
                slot = {method, n_wedge_of(method), size, run, seed, dataset_status, 0.0};
                if (dataset_status != "ok") continue;
                try {
                    if (method == "behavior") {
                        slot.perf = ctx.rho_behavior;
                    } else if (method == "optimal") {
                        slot.perf = ctx.rho_optimal;
                    } else if (method == "basic_rl") {
                        slot.perf = performance(ctx.env, basic_rl_policy(mle));
                    } else {
                        SpibbProblem problem{mle, ctx.pi_b,
                                             bootstrap_set(counts, slot.n_wedge, ctx.env),
                                             1e-9};
                        slot.perf = performance(ctx.env, spibb_policy(problem));
                    }
                } catch (const std::exception& e) {
                    slot.status = sanitize_status(e.what());
                    slot.perf = 0.0;
                }
            }
        }
    };

    int n_workers = std::max(1, cfg.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return results;
}

double cvar(std::vector<double> values, double alpha) {
    if (values.empty()) throw EmptyInputError("cvar: empty sample");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("cvar: alpha must be in (0,1]");
    std::sort(values.begin(), values.end());
    std::size_t k = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(values.size())));
    k = std::max<std::size_t>(1, std::min(k, values.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += values[i];
    return sum / static_cast<double>(k);
}

std::vector<SummaryRow> aggregate(const std::vector<RunResult>& results,
                                  const std::string& env_name) {
    // Group in first-appearance order so the summary follows the raw order.
    std::vector<std::pair<std::string, std::int64_t>> keys;
    std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
    for (const RunResult& r : results) {
        if (r.status != "ok") continue;
        auto key = std::make_pair(r.method, r.dataset_size);
        if (!groups.count(key)) keys.push_back(key);
        groups[key].push_back(r.perf);
    }
    std::vector<SummaryRow> out;
    out.reserve(keys.size());
    for (const auto& key : keys) {
        const std::vector<double>& vals = groups[key];
        double sum = 0.0;
        for (double v : vals) sum += v;
        out.push_back({env_name, key.first, key.second,
                       sum / static_cast<double>(vals.size()), cvar(vals, 0.10),
                       cvar(vals, 0.01), static_cast<std::int64_t>(vals.size())});
    }
    return out;
}

std::string raw_csv(const std::vector<RunResult>& raw, const std::string& env_name) {
    std::ostringstream out;
    out << "env,method,n_wedge,dataset_size,run,seed,status,perf\n";
    for (const RunResult& r : raw)
        out << env_name << ',' << r.method << ',' << r.n_wedge << ',' << r.dataset_size
            << ',' << r.run << ',' << r.seed << ',' << r.status << ','
            << format_double(r.perf) << '\n';
    return out.str();
}

std::string summary_csv(const std::vector<SummaryRow>& summary) {
    std::ostringstream out;
    out << "env,method,dataset_size,mean,cvar10,cvar1,n_runs\n";
    for (const SummaryRow& r : summary)
        out << r.env << ',' << r.method << ',' << r.dataset_size << ','
            << format_double(r.mean) << ',' << format_double(r.cvar10) << ','
            << format_double(r.cvar1) << ',' << r.n_runs << '\n';
    return out.str();
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
    std::vector<SummaryRow> out;
    std::string line;
    if (!std::getline(in, line)) throw IoError("summary csv: empty input");
    if (trim(line) != "env,method,dataset_size,mean,cvar10,cvar1,n_runs")
        throw IoError("summary csv: unexpected header: " + line);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        SummaryRow r;
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw IoError("summary csv: bad row: " + line);
            return field;
        };
        r.env = next();
        r.method = next();
        r.dataset_size = std::stoll(next());
        r.mean = std::stod(next());
        r.cvar10 = std::stod(next());
        r.cvar1 = std::stod(next());
        r.n_runs = std::stoll(next());
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

} // namespace

std::string render_svg(const std::vector<SummaryRow>& summary,
                       const std::string& env_name, double rho_behavior,
                       double rho_optimal) {
    constexpr double W = 720, H = 480, L = 70, R = 180, T = 40, B = 50;
    const double plot_w = W - L - R, plot_h = H - T - B;

    std::vector<std::string> methods;
    double x_lo = 1e300, x_hi = -1e300, y_lo = rho_behavior, y_hi = rho_behavior;
    y_lo = std::min(y_lo, rho_optimal);
    y_hi = std::max(y_hi, rho_optimal);
    for (const SummaryRow& r : summary) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        double lx = std::log10(static_cast<double>(r.dataset_size));
        x_lo = std::min(x_lo, lx);
        x_hi = std::max(x_hi, lx);
        y_lo = std::min({y_lo, r.mean, r.cvar10, r.cvar1});
        y_hi = std::max({y_hi, r.mean, r.cvar10, r.cvar1});
    }
    if (x_lo > x_hi) {
        x_lo = 0;
        x_hi = 1;
    }
    if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;
    double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto sx = [&](double size) {
        double lx = std::log10(size);
        return x_hi > x_lo ? L + (lx - x_lo) / (x_hi - x_lo) * plot_w : L + plot_w / 2;
    };
    auto sy = [&](double v) { return T + (y_hi - v) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << env_name << ": performance vs dataset size</text>\n";

    // axes
    svg << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(T + plot_h) << "\" x2=\""
        << fmt2(L + plot_w) << "\" y2=\"" << fmt2(T + plot_h)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(T) << "\" x2=\"" << fmt2(L)
        << "\" y2=\"" << fmt2(T + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int e = static_cast<int>(std::ceil(x_lo)); e <= static_cast<int>(std::floor(x_hi));
         ++e) {
        double x = sx(std::pow(10.0, e));
        svg << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(T + plot_h) << "\" x2=\""
            << fmt2(x) << "\" y2=\"" << fmt2(T + plot_h + 5)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(x - 12) << "\" y=\"" << fmt2(T + plot_h + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\">1e" << e << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        double v = y_lo + (y_hi - y_lo) * i / 4.0;
        svg << "<text x=\"" << fmt2(L - 55) << "\" y=\"" << fmt2(sy(v) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt2(v)
            << "</text>\n";
    }

    // reference levels
    svg << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(sy(rho_behavior)) << "\" x2=\""
        << fmt2(L + plot_w) << "\" y2=\"" << fmt2(sy(rho_behavior))
        << "\" stroke=\"#444444\" stroke-width=\"1\" stroke-dasharray=\"2,4\"/>\n";
    svg << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(sy(rho_optimal)) << "\" x2=\""
        << fmt2(L + plot_w) << "\" y2=\"" << fmt2(sy(rho_optimal))
        << "\" stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"6,3\"/>\n";

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string& method = methods[mi];
        const char* color = kPalette[mi % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const char* dashes[] = {"", "6,3", "2,3"};
        for (int series = 0; series < 3; ++series) {
            std::string d;
            for (const SummaryRow& r : summary) {
                if (r.method != method) continue;
                double v = series == 0 ? r.mean : series == 1 ? r.cvar10 : r.cvar1;
                d += d.empty() ? "M" : " L";
                d += fmt2(sx(static_cast<double>(r.dataset_size))) + "," + fmt2(sy(v));
            }
            if (d.empty()) continue;
            svg << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"" << (series == 0 ? 2 : 1) << "\"";
            if (series > 0) svg << " stroke-dasharray=\"" << dashes[series] << "\"";
            svg << "/>\n";
        }
        double ly = T + 16 + 18 * static_cast<double>(mi);
        svg << "<line x1=\"" << fmt2(W - R + 10) << "\" y1=\"" << fmt2(ly - 4)
            << "\" x2=\"" << fmt2(W - R + 34) << "\" y2=\"" << fmt2(ly - 4)
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt2(W - R + 40) << "\" y=\"" << fmt2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << method
            << "</text>\n";
    }
    double ly = T + 16 + 18 * static_cast<double>(methods.size());
    svg << "<text x=\"" << fmt2(W - R + 10) << "\" y=\"" << fmt2(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">solid mean, dashed CVaR10/1"
        << "</text>\n";
    svg << "<text x=\"" << fmt2(W - R + 10) << "\" y=\"" << fmt2(ly + 16)
        << "\" font-family=\"sans-serif\" font-size=\"11\">grey: behavior / optimal"
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_outputs(const std::vector<SummaryRow>& summary,
                  const std::vector<RunResult>& raw, const std::string& env_name,
                  const std::string& out_dir, double rho_behavior, double rho_optimal) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    auto write_file = [&](const std::string& name, const std::string& body) {
        std::string path = out_dir + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path);
        out << body;
        if (!out) throw IoError("write failed: " + path);
    };
    write_file("raw.csv", raw_csv(raw, env_name));
    write_file("summary.csv", summary_csv(summary));
    write_file(env_name + ".svg", render_svg(summary, env_name, rho_behavior, rho_optimal));
}

} // namespace spibb
