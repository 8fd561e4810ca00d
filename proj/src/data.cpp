#include "spibb/data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "spibb/mdp_io.hpp"

namespace spibb {

TransitionCounts TransitionCounts::with_shape(int n_states, int n_actions) {
    TransitionCounts c;
    c.n_states = n_states;
    c.n_actions = n_actions;
    c.pair_counts.assign(n_states, std::vector<std::int64_t>(n_actions, 0));
    c.reward_sums.assign(n_states, std::vector<double>(n_actions, 0.0));
    c.triples.assign(n_states,
                     std::vector<std::vector<std::pair<int, std::int64_t>>>(n_actions));
    return c;
}

std::int64_t TransitionCounts::triple(int s, int a, int t) const {
    for (const auto& [state, n] : triples[s][a])
        if (state == t) return n;
    return 0;
}

void TransitionCounts::add_step(int s, int a, double reward, int t, std::int64_t n) {
    pair_counts[s][a] += n;
    reward_sums[s][a] += reward * static_cast<double>(n);
    auto& row = triples[s][a];
    auto it = std::lower_bound(row.begin(), row.end(), t,
                               [](const auto& e, int key) { return e.first < key; });
    if (it != row.end() && it->first == t)
        it->second += n;
    else
        row.insert(it, {t, n});
}

void TransitionCounts::add(const Trajectory& trajectory) {
    for (const Trajectory::Step& step : trajectory.steps)
        add_step(step.state, step.action, step.reward, step.next_state);
}

void TransitionCounts::merge(const TransitionCounts& other) {
    if (other.n_states != n_states || other.n_actions != n_actions)
        throw DimensionMismatchError("counts merge: shape mismatch");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            pair_counts[s][a] += other.pair_counts[s][a];
            reward_sums[s][a] += other.reward_sums[s][a];
            for (const auto& [t, n] : other.triples[s][a]) {
                auto& row = triples[s][a];
                auto it = std::lower_bound(row.begin(), row.end(), t,
                                           [](const auto& e, int key) { return e.first < key; });
                if (it != row.end() && it->first == t)
                    it->second += n;
                else
                    row.insert(it, {t, n});
            }
        }
}

std::int64_t TransitionCounts::total() const {
    std::int64_t sum = 0;
    for (const auto& per_state : pair_counts)
        for (std::int64_t n : per_state) sum += n;
    return sum;
}

void TransitionCounts::validate() const {
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            std::int64_t sum = 0;
            for (const auto& [t, n] : triples[s][a]) {
                if (n < 0) throw InvalidInputError("counts: negative triple count");
                sum += n;
            }
            if (sum != pair_counts[s][a])
                throw InvalidInputError("counts: pair/triple mismatch at (" +
                                        std::to_string(s) + "," + std::to_string(a) + ")");
        }
}

std::vector<std::pair<int, int>> BootstrapSet::members() const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            if (bootstrapped[s][a]) out.emplace_back(s, a);
    return out;
}

std::int64_t BootstrapSet::size() const {
    std::int64_t n = 0;
    for (const auto& per_state : bootstrapped)
        for (char b : per_state) n += (b != 0);
    return n;
}

namespace {

// CDF walk; the tail guard absorbs floating-point shortfall.
template <typename Entries, typename Prob>
int sample_index(const Entries& entries, Prob prob_of, double u) {
    double cum = 0.0;
    int last = -1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double p = prob_of(entries[i]);
        if (p <= 0.0) continue;
        last = static_cast<int>(i);
        cum += p;
        if (u < cum) return last;
    }
    return last;
}

} // namespace

std::vector<Trajectory> sample_trajectories(const TabularMdp& mdp,
                                            const StochasticPolicy& pi_b,
                                            std::int64_t n_steps, int episode_len,
                                            std::uint64_t rng_seed) {
    if (n_steps <= 0) throw InvalidInputError("sampling: n_steps must be positive");
    if (episode_len <= 0) throw InvalidInputError("sampling: episode_len must be positive");
    pi_b.validate(mdp);

    std::vector<char> absorbing(mdp.n_states, 0);
    for (int s = 0; s < mdp.n_states; ++s) absorbing[s] = mdp.is_absorbing(s) ? 1 : 0;

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Trajectory> out;
    out.emplace_back();
    int state = mdp.initial_state;
    int in_episode = 0;
    for (std::int64_t step = 0; step < n_steps; ++step) {
        const auto& row = pi_b.probs[state];
        int action = sample_index(row, [](double p) { return p; }, unit(rng));
        const SparseRow& succ = mdp.transitions[state][action];
        int idx = sample_index(succ, [](const SuccessorEntry& e) { return e.prob; },
                               unit(rng));
        int next = succ[idx].state;
        out.back().steps.push_back({state, action, mdp.rewards[state][action], next});
        ++in_episode;
        if (absorbing[next] || in_episode >= episode_len) {
            state = mdp.initial_state;
            in_episode = 0;
            if (step + 1 < n_steps) out.emplace_back();
        } else {
            state = next;
        }
    }
    return out;
}

TransitionCounts count(const std::vector<Trajectory>& trajectories, int n_states,
                       int n_actions) {
    TransitionCounts c = TransitionCounts::with_shape(n_states, n_actions);
    for (const Trajectory& trajectory : trajectories) c.add(trajectory);
    return c;
}

TabularMdp build_mle_mdp(const TransitionCounts& counts, const TabularMdp& shape,
                         RewardModel rewards) {
    if (counts.n_states != shape.n_states || counts.n_actions != shape.n_actions)
        throw DimensionMismatchError("mle: counts shape does not match the template");
    TabularMdp m = TabularMdp::with_shape(shape.n_states, shape.n_actions);
    m.initial_state = shape.initial_state;
    m.default_discount = shape.default_discount;
    m.state_discount = shape.state_discount;
    m.r_max = shape.r_max;
    for (int s = 0; s < shape.n_states; ++s) {
        for (int a = 0; a < shape.n_actions; ++a) {
            if (!shape.enabled(s, a)) continue;
            std::int64_t n = counts.pair_counts[s][a];
            if (n == 0) {
                m.transitions[s][a] = {{s, 1.0}};
                m.rewards[s][a] = 0.0;
                continue;
            }
            SparseRow row;
            row.reserve(counts.triples[s][a].size());
            for (const auto& [t, c] : counts.triples[s][a])
                row.push_back({t, static_cast<double>(c) / static_cast<double>(n)});
            m.transitions[s][a] = std::move(row);
            m.rewards[s][a] = rewards == RewardModel::Known
                                  ? shape.rewards[s][a]
                                  : counts.reward_sums[s][a] / static_cast<double>(n);
        }
    }
    return m;
}

BootstrapSet bootstrap_set(const TransitionCounts& counts, std::int64_t n_wedge,
                           const TabularMdp& shape) {
    if (n_wedge < 0) throw InvalidInputError("bootstrap set: threshold must be >= 0");
    if (counts.n_states != shape.n_states || counts.n_actions != shape.n_actions)
        throw DimensionMismatchError("bootstrap set: counts shape mismatch");
    BootstrapSet u;
    u.n_states = shape.n_states;
    u.n_actions = shape.n_actions;
    u.bootstrapped.assign(shape.n_states, std::vector<char>(shape.n_actions, 0));
    for (int s = 0; s < shape.n_states; ++s)
        for (int a = 0; a < shape.n_actions; ++a)
            if (shape.enabled(s, a) && counts.pair_counts[s][a] <= n_wedge)
                u.bootstrapped[s][a] = 1;
    return u;
}

BootstrapSet bootstrap_set_two_successor(const TransitionCounts& counts,
                                         std::int64_t n_wedge, const TwoSuccessorMdp& t) {
    BootstrapSet u = bootstrap_set(counts, n_wedge, t.mdp);
    for (int x = t.n_main; x < t.mdp.n_states; ++x) u.bootstrapped[x][t.tau_action] = 1;
    return u;
}

TransitionCounts transform_dataset(const TransitionCounts& counts) {
    // Aux ids continue after the original states, assigned in (s, a) order,
    // matching transform_mdp over the MLE model of the same counts.
    int next_id = counts.n_states;
    for (int s = 0; s < counts.n_states; ++s)
        for (int a = 0; a < counts.n_actions; ++a) {
            int k = static_cast<int>(counts.triples[s][a].size());
            if (k > 2) next_id += k - 2;
        }

    TransitionCounts out = TransitionCounts::with_shape(next_id, counts.n_actions + 1);
    int tau = counts.n_actions;
    int aux = counts.n_states;
    for (int s = 0; s < counts.n_states; ++s) {
        for (int a = 0; a < counts.n_actions; ++a) {
            const auto& observed = counts.triples[s][a];
            int k = static_cast<int>(observed.size());
            if (k == 0) continue;
            out.reward_sums[s][a] = counts.reward_sums[s][a];
            if (k <= 2) {
                out.pair_counts[s][a] = counts.pair_counts[s][a];
                out.triples[s][a] = observed;
                continue;
            }
            std::vector<std::int64_t> suffix(k + 1, 0);
            for (int i = k - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + observed[i].second;

            int first_aux = aux;
            out.pair_counts[s][a] = suffix[0];
            out.triples[s][a] = {{observed[0].first, observed[0].second},
                                 {first_aux, suffix[1]}};
            for (int i = 2; i <= k - 1; ++i, ++aux) {
                out.pair_counts[aux][tau] = suffix[i - 1];
                if (i < k - 1) {
                    out.triples[aux][tau] = {{observed[i - 1].first, observed[i - 1].second},
                                             {aux + 1, suffix[i]}};
                } else {
                    out.triples[aux][tau] = {{observed[k - 2].first, observed[k - 2].second},
                                             {observed[k - 1].first, observed[k - 1].second}};
                }
            }
        }
    }
    out.validate();
    return out;
}

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    bool first = true;
    for (const Trajectory& trajectory : trajectories) {
        if (!first) out << '\n';
        first = false;
        for (const Trajectory::Step& step : trajectory.steps)
            out << step.state << ' ' << step.action << ' ' << format_double(step.reward)
                << ' ' << step.next_state << '\n';
    }
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
    std::vector<Trajectory> out;
    Trajectory current;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (blank) {
            if (!current.steps.empty()) {
                out.push_back(std::move(current));
                current = Trajectory{};
            }
            continue;
        }
        std::istringstream ls(line);
        Trajectory::Step step{};
        ls >> step.state >> step.action >> step.reward >> step.next_state;
        if (ls.fail()) throw IoError("trajectory read: bad line: " + line);
        if (!current.steps.empty() && current.steps.back().next_state != step.state)
            throw InvalidInputError("trajectory read: steps do not chain");
        current.steps.push_back(step);
    }
    if (!current.steps.empty()) out.push_back(std::move(current));
    return out;
}

void write_counts(std::ostream& out, const TransitionCounts& counts) {
    for (int s = 0; s < counts.n_states; ++s)
        for (int a = 0; a < counts.n_actions; ++a)
            for (const auto& [t, n] : counts.triples[s][a])
                out << "c " << s << ' ' << a << ' ' << t << ' ' << n << '\n';
}

TransitionCounts read_counts(std::istream& in, int n_states, int n_actions) {
    TransitionCounts c = TransitionCounts::with_shape(n_states, n_actions);
    std::string line, tag;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        int s, a, t;
        std::int64_t n;
        ls >> tag >> s >> a >> t >> n;
        if (tag != "c" || ls.fail() || s < 0 || s >= n_states || a < 0 ||
            a >= n_actions || t < 0 || t >= n_states)
            throw IoError("counts read: bad line: " + line);
        c.add_step(s, a, 0.0, t, n);
    }
    return c;
}

} // namespace spibb
