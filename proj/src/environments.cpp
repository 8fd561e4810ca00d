#include "spibb/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "spibb/value_iteration.hpp"

namespace spibb {

double EnvSpec::get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

namespace {

void reject_unknown_keys(const EnvSpec& spec, const std::set<std::string>& known) {
    for (const auto& [key, value] : spec.params)
        if (!known.count(key))
            throw InvalidParametersError("env " + spec.name + ": unknown parameter " + key);
}

void add_prob(SparseRow& row, int state, double prob) {
    if (prob <= 0.0) return;
    for (SuccessorEntry& e : row) {
        if (e.state == state) {
            e.prob += prob;
            return;
        }
    }
    row.push_back({state, prob});
}

void sort_row(SparseRow& row) {
    std::sort(row.begin(), row.end(),
              [](const SuccessorEntry& x, const SuccessorEntry& y) {
                  return x.state < y.state;
              });
}

// up, down, left, right
constexpr std::array<std::pair<int, int>, 4> kMoves{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// ---------------------------------------------------------------------------
// Gridworld: stochastic shortest path to an absorbing goal corner. The agent
// slips sideways with the residual probability; walls reflect.
// ---------------------------------------------------------------------------

TabularMdp build_gridworld(const EnvSpec& spec) {
    reject_unknown_keys(spec, {"size", "slip", "goal_reward", "gamma"});
    int size = static_cast<int>(spec.get("size", 5));
    double slip = spec.get("slip", 0.75);
    double goal_reward = spec.get("goal_reward", 1.0);
    double gamma = spec.get("gamma", 0.95);
    if (size < 2 || !(slip > 0.0 && slip <= 1.0))
        throw InvalidParametersError("gridworld: bad size or slip");

    int n = size * size;
    int goal = n - 1;
    TabularMdp m = TabularMdp::with_shape(n, 4);
    m.initial_state = 0;
    m.default_discount = gamma;
    m.r_max = goal_reward;

    double lateral = (1.0 - slip) / 2.0;
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            SparseRow row;
            if (s == goal) {
                row.push_back({s, 1.0});
            } else {
                int r = s / size, c = s % size;
                // lateral slip directions are the two axes orthogonal to a
                const std::array<int, 2> lat = a < 2 ? std::array<int, 2>{2, 3}
                                                     : std::array<int, 2>{0, 1};
                auto land = [&](int dir) {
                    int nr = r + kMoves[dir].first, nc = c + kMoves[dir].second;
                    return (nr < 0 || nr >= size || nc < 0 || nc >= size) ? s
                                                                          : nr * size + nc;
                };
                add_prob(row, land(a), slip);
                add_prob(row, land(lat[0]), lateral);
                add_prob(row, land(lat[1]), lateral);
                for (const SuccessorEntry& e : row)
                    if (e.state == goal) m.rewards[s][a] = e.prob * goal_reward;
            }
            sort_row(row);
            m.transitions[s][a] = std::move(row);
        }
    }
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Wet chicken, discretized: a paddler drifts down a river towards a
// waterfall. The reward grows with the downstream position, falling off the
// edge resets to the start. The current is stronger and the turbulence
// weaker towards high y.
// ---------------------------------------------------------------------------

TabularMdp build_wet_chicken(const EnvSpec& spec) {
    reject_unknown_keys(spec, {"length", "width", "turbulence", "gamma"});
    int length = static_cast<int>(spec.get("length", 5));
    int width = static_cast<int>(spec.get("width", 5));
    double turbulence = spec.get("turbulence", 0.9);
    double gamma = spec.get("gamma", 0.95);
    if (length < 2 || width < 2 || !(turbulence > 0.0 && turbulence <= 1.0))
        throw InvalidParametersError("wet_chicken: bad dimensions or turbulence");

    const int n = length * width;
    const int n_actions = 5; // drift, hold, back, right, left
    auto id = [width](int x, int y) { return x * width + y; };

    TabularMdp m = TabularMdp::with_shape(n, n_actions);
    m.initial_state = id(0, 0);
    m.default_discount = gamma;
    m.r_max = static_cast<double>(length - 1);

    for (int x = 0; x < length; ++x) {
        for (int y = 0; y < width; ++y) {
            int s = id(x, y);
            int flow = (2 * y) / (width - 1);
            double turb = turbulence * (1.0 - 0.7 * y / (width - 1));
            for (int a = 0; a < n_actions; ++a) {
                int dx = 0, dy = 0;
                switch (a) {
                    case 0: dx = flow; break;          // drift with the current
                    case 1: dx = 0; break;             // hold against the current
                    case 2: dx = flow - 2; break;      // paddle back
                    case 3: dx = flow; dy = 1; break;  // move right
                    case 4: dx = flow; dy = -1; break; // move left
                }
                int ny = std::clamp(y + dy, 0, width - 1);
                SparseRow row;
                for (int noise = -1; noise <= 1; ++noise) {
                    double p = noise == 0 ? 1.0 - turb : turb / 2.0;
                    int nx = x + dx + noise;
                    int next = nx >= length ? m.initial_state // waterfall
                                            : id(std::max(nx, 0), ny);
                    add_prob(row, next, p);
                }
                sort_row(row);
                m.transitions[s][a] = std::move(row);
                m.rewards[s][a] = static_cast<double>(x);
            }
        }
    }
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Resource gathering: collect gold and gems on a 10x10 map with rocks and
// patrolled cells, deliver at the home base. Entering a resource cell picks
// the resource up; the delivery reward is granted with the next move taken at
// home, which also empties the bags. Stepping onto an enemy cell risks an
// attack that sends the agent home empty-handed at a penalty. States are the
// reachable (position, carried-gold, carried-gem) triples.
//
// The gold sits in a corner pocket whose only entrance is a patrolled cell,
// so the best loop (home, gate, gold, gate, home) risks two attacks per
// delivery; the gem in the open east is the safe but slower alternative. A
// rock wall across row 2 with its gap at the second patrolled cell shapes the
// northern routes.
// ---------------------------------------------------------------------------

struct RgCell {
    int r, c;
    bool operator<(const RgCell& o) const { return r != o.r ? r < o.r : c < o.c; }
    bool operator==(const RgCell& o) const { return r == o.r && c == o.c; }
};

constexpr std::array<RgCell, 5> kRgRocks{{{2, 2}, {2, 3}, {2, 5}, {2, 6}, {8, 0}}};

TabularMdp build_resource_gathering(const EnvSpec& spec) {
    reject_unknown_keys(spec, {"width", "height", "home_r", "home_c", "gold_r", "gold_c",
                               "gem_r", "gem_c", "enemy1_r", "enemy1_c", "enemy2_r",
                               "enemy2_c", "attack_prob", "gold_reward", "gem_reward",
                               "enemy_penalty", "gamma"});
    const int width = static_cast<int>(spec.get("width", 10));
    const int height = static_cast<int>(spec.get("height", 10));
    const RgCell home{static_cast<int>(spec.get("home_r", 9)),
                      static_cast<int>(spec.get("home_c", 4))};
    const RgCell gold{static_cast<int>(spec.get("gold_r", 9)),
                      static_cast<int>(spec.get("gold_c", 0))};
    const RgCell gem{static_cast<int>(spec.get("gem_r", 4)),
                     static_cast<int>(spec.get("gem_c", 9))};
    const std::array<RgCell, 2> enemies{
        RgCell{static_cast<int>(spec.get("enemy1_r", 9)),
               static_cast<int>(spec.get("enemy1_c", 1))},
        RgCell{static_cast<int>(spec.get("enemy2_r", 2)),
               static_cast<int>(spec.get("enemy2_c", 4))}};
    const double attack_prob = spec.get("attack_prob", 0.1);
    const double gold_reward = spec.get("gold_reward", 1.0);
    const double gem_reward = spec.get("gem_reward", 1.0);
    const double enemy_penalty = spec.get("enemy_penalty", 1.0);
    const double gamma = spec.get("gamma", 0.95);
    if (!(attack_prob > 0.0 && attack_prob < 1.0))
        throw InvalidParametersError("resource_gathering: attack_prob must be in (0,1)");

    auto is_rock = [&](const RgCell& p) {
        return std::find(kRgRocks.begin(), kRgRocks.end(), p) != kRgRocks.end();
    };
    auto in_map = [&](const RgCell& p) {
        return p.r >= 0 && p.r < height && p.c >= 0 && p.c < width && !is_rock(p);
    };
    auto is_enemy = [&](const RgCell& p) { return p == enemies[0] || p == enemies[1]; };
    for (const RgCell& p : {home, gold, gem, enemies[0], enemies[1]})
        if (!in_map(p))
            throw InvalidParametersError("resource_gathering: special cell off the map");
    if (home == gold || home == gem || gold == gem || is_enemy(home) || is_enemy(gold) ||
        is_enemy(gem))
        throw InvalidParametersError("resource_gathering: special cells must be distinct");

    struct RgState {
        RgCell pos;
        int has_gold, has_gem;
        bool operator<(const RgState& o) const {
            if (!(pos == o.pos)) return pos < o.pos;
            if (has_gold != o.has_gold) return has_gold < o.has_gold;
            return has_gem < o.has_gem;
        }
        bool operator==(const RgState& o) const = default;
    };

    const RgState start{home, 0, 0};

    // One action's outcome distribution, before state interning.
    auto outcomes = [&](const RgState& st, int a) {
        std::vector<std::pair<RgState, double>> out;
        RgCell dest{st.pos.r + kMoves[a].first, st.pos.c + kMoves[a].second};
        if (!in_map(dest)) dest = st.pos;
        int g = st.pos == home ? 0 : st.has_gold; // leaving home empties the bags
        int mgem = st.pos == home ? 0 : st.has_gem;
        RgState landed{dest, dest == gold ? 1 : g, dest == gem ? 1 : mgem};
        if (is_enemy(dest)) {
            out.push_back({landed, 1.0 - attack_prob});
            out.push_back({start, attack_prob});
        } else {
            out.push_back({landed, 1.0});
        }
        return out;
    };

    // Reachable states, then ids in lexicographic order.
    std::set<RgState> reachable{start};
    std::deque<RgState> frontier{start};
    while (!frontier.empty()) {
        RgState st = frontier.front();
        frontier.pop_front();
        for (int a = 0; a < 4; ++a)
            for (const auto& [next, prob] : outcomes(st, a))
                if (reachable.insert(next).second) frontier.push_back(next);
    }
    std::vector<RgState> states(reachable.begin(), reachable.end());
    auto state_id = [&](const RgState& st) {
        return static_cast<int>(std::lower_bound(states.begin(), states.end(), st) -
                                states.begin());
    };

    TabularMdp m = TabularMdp::with_shape(static_cast<int>(states.size()), 4);
    m.initial_state = state_id(start);
    m.default_discount = gamma;

    double max_reward = 0.0;
    for (int s = 0; s < m.n_states; ++s) {
        const RgState& st = states[s];
        double delivery = st.pos == home
                              ? gold_reward * st.has_gold + gem_reward * st.has_gem
                              : 0.0;
        for (int a = 0; a < 4; ++a) {
            SparseRow row;
            for (const auto& [next, prob] : outcomes(st, a))
                add_prob(row, state_id(next), prob);
            sort_row(row);
            m.transitions[s][a] = std::move(row);

            RgCell dest{st.pos.r + kMoves[a].first, st.pos.c + kMoves[a].second};
            if (!in_map(dest)) dest = st.pos;
            double reward = delivery - (is_enemy(dest) ? enemy_penalty * attack_prob : 0.0);
            m.rewards[s][a] = reward;
            max_reward = std::max(max_reward, std::abs(reward));
        }
    }
    m.r_max = max_reward;
    m.validate();
    return m;
}

} // namespace

EnvSpec default_env_spec(const std::string& name) {
    if (name == "gridworld")
        return {name, {{"size", 5}, {"slip", 0.75}, {"goal_reward", 1}, {"gamma", 0.95}}};
    if (name == "wet_chicken")
        return {name, {{"length", 5}, {"width", 5}, {"turbulence", 0.9}, {"gamma", 0.95}}};
    if (name == "resource_gathering")
        return {name,
                {{"width", 10},
                 {"height", 10},
                 {"home_r", 9},
                 {"home_c", 4},
                 {"gold_r", 9},
                 {"gold_c", 0},
                 {"gem_r", 4},
                 {"gem_c", 9},
                 {"enemy1_r", 9},
                 {"enemy1_c", 1},
                 {"enemy2_r", 2},
                 {"enemy2_c", 4},
                 {"attack_prob", 0.1},
                 {"gold_reward", 1},
                 {"gem_reward", 1},
                 {"enemy_penalty", 1},
                 {"gamma", 0.95}}};
    throw UnknownEnvError("unknown environment: " + name);
}

TabularMdp build_env(const EnvSpec& spec) {
    if (spec.name == "gridworld") return build_gridworld(spec);
    if (spec.name == "wet_chicken") return build_wet_chicken(spec);
    if (spec.name == "resource_gathering") return build_resource_gathering(spec);
    throw UnknownEnvError("unknown environment: " + spec.name);
}

EnvSpec read_env_spec(std::istream& in) {
    EnvSpec spec;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string tag;
            ls >> tag >> spec.name;
            if (tag != "env" || ls.fail()) throw IoError("env spec: bad header: " + line);
            have_header = true;
            continue;
        }
        std::string key;
        double value;
        ls >> key >> value;
        if (ls.fail()) throw IoError("env spec: bad line: " + line);
        spec.params[key] = value;
    }
    if (!have_header) throw IoError("env spec: missing header");
    return spec;
}

EnvSpec read_env_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return read_env_spec(in);
}

void write_env_spec(std::ostream& out, const EnvSpec& spec) {
    out << "env " << spec.name << '\n';
    for (const auto& [key, value] : spec.params) {
        std::ostringstream v;
        v << value;
        out << key << ' ' << v.str() << '\n';
    }
}

StochasticPolicy behavior_softmax_q(const TabularMdp& mdp, std::int64_t q_steps,
                                    double lr, double temp, std::uint64_t rng_seed) {
    if (q_steps <= 0 || !(lr > 0.0) || !(temp > 0.0))
        throw InvalidParametersError("softmax q: hyperparameters must be positive");
    mdp.validate();

    constexpr int kEpisodeCap = 200;
    std::vector<char> absorbing(mdp.n_states, 0);
    for (int s = 0; s < mdp.n_states; ++s) absorbing[s] = mdp.is_absorbing(s) ? 1 : 0;

    std::vector<std::vector<double>> q(mdp.n_states,
                                       std::vector<double>(mdp.n_actions, 0.0));
    auto softmax_row = [&](int s) {
        std::vector<double> p(mdp.n_actions, 0.0);
        double max_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a)) max_q = std::max(max_q, q[s][a]);
        double z = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (!mdp.enabled(s, a)) continue;
            p[a] = std::exp((q[s][a] - max_q) / temp);
            z += p[a];
        }
        for (double& v : p) v /= z;
        return p;
    };
    auto max_q_enabled = [&](int s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a)) best = std::max(best, q[s][a]);
        return best;
    };

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int state = mdp.initial_state;
    int in_episode = 0;
    for (std::int64_t step = 0; step < q_steps; ++step) {
        std::vector<double> p = softmax_row(state);
        double u = unit(rng), cum = 0.0;
        int action = -1;
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (p[a] <= 0.0) continue;
            action = a;
            cum += p[a];
            if (u < cum) break;
        }
        const SparseRow& succ = mdp.transitions[state][action];
        double u2 = unit(rng);
        cum = 0.0;
        int next = succ.back().state;
        for (const SuccessorEntry& e : succ) {
            cum += e.prob;
            if (u2 < cum) {
                next = e.state;
                break;
            }
        }
        double target = mdp.rewards[state][action] + mdp.discount(state) * max_q_enabled(next);
        q[state][action] += lr * (target - q[state][action]);
        ++in_episode;
        if (absorbing[next] || in_episode >= kEpisodeCap) {
            state = mdp.initial_state;
            in_episode = 0;
        } else {
            state = next;
        }
    }

    StochasticPolicy pi = StochasticPolicy::zeros(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) pi.probs[s] = softmax_row(s);
    return pi;
}

StochasticPolicy behavior_perturbed_optimal(const TabularMdp& mdp, double epsilon) {
    if (epsilon < 0.0) throw InvalidEpsilonError("perturbed optimal: epsilon must be >= 0");
    StochasticPolicy best = greedy_policy(mdp);
    StochasticPolicy pi = StochasticPolicy::zeros(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        int enabled = 0, star = -1;
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (mdp.enabled(s, a)) ++enabled;
            if (best.probs[s][a] == 1.0) star = a;
        }
        double others = epsilon * (enabled - 1);
        if (others >= 1.0)
            throw InvalidEpsilonError("perturbed optimal: epsilon too large for " +
                                      std::to_string(enabled) + " actions");
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a)) pi.probs[s][a] = a == star ? 1.0 - others : epsilon;
        // Nudge the optimal entry until the left-to-right row sum is exactly 1.
        for (int pass = 0; pass < 4; ++pass) {
            double sum = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) sum += pi.probs[s][a];
            if (sum == 1.0) break;
            pi.probs[s][star] += 1.0 - sum;
        }
    }
    return pi;
}

} // namespace spibb
