#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "spibb/mdp.hpp"
#include "spibb/two_successor.hpp"

namespace spibb {

/// One sampled episode; consecutive steps chain (next_state of step t equals
/// state of step t+1).
struct Trajectory {
    struct Step {
        int state;
        int action;
        double reward;
        int next_state;
    };
    std::vector<Step> steps;
};

/// Aggregated visit counters over a data set.
struct TransitionCounts {
    int n_states = 0;
    int n_actions = 0;
    /// pair_counts[s][a]: number of times (s,a) was taken.
    std::vector<std::vector<std::int64_t>> pair_counts;
    /// reward_sums[s][a]: accumulated reward, for estimating rewards.
    std::vector<std::vector<double>> reward_sums;
    /// triples[s][a]: observed successors with counts, sorted by state.
    std::vector<std::vector<std::vector<std::pair<int, std::int64_t>>>> triples;

    static TransitionCounts with_shape(int n_states, int n_actions);

    std::int64_t pair(int s, int a) const { return pair_counts[s][a]; }
    std::int64_t triple(int s, int a, int t) const;

    void add_step(int s, int a, double reward, int t, std::int64_t n = 1);
    void add(const Trajectory& trajectory);

    /// Merge in another counter of the same shape (sharded counting).
    void merge(const TransitionCounts& other);

    /// Total steps across all pairs.
    std::int64_t total() const;

    /// Consistency: each pair count equals the sum of its triple counts.
    void validate() const;
};

/// Pairs with too few samples; improved policies must follow the behavior
/// policy exactly on them.
struct BootstrapSet {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::vector<char>> bootstrapped;

    bool contains(int s, int a) const { return bootstrapped[s][a] != 0; }
    std::vector<std::pair<int, int>> members() const;
    std::int64_t size() const;
};

/// Sentinel threshold meaning "bootstrap everything".
inline constexpr std::int64_t kBootstrapAll = std::numeric_limits<std::int64_t>::max();

/// Samples episodes from `mdp` under `pi_b` until exactly `n_steps` steps are
/// collected. Episodes start at the initial state and end at absorbing states
/// or after `episode_len` steps; the last episode may be truncated.
/// Deterministic for a fixed seed.
std::vector<Trajectory> sample_trajectories(const TabularMdp& mdp,
                                            const StochasticPolicy& pi_b,
                                            std::int64_t n_steps, int episode_len,
                                            std::uint64_t rng_seed);

TransitionCounts count(const std::vector<Trajectory>& trajectories, int n_states,
                       int n_actions);

enum class RewardModel {
    Known,     ///< copy rewards from the template (default)
    Estimated, ///< reward_sums / pair count
};

/// Maximum-likelihood MDP: rows of visited pairs are empirical successor
/// frequencies; unvisited enabled pairs become zero-reward self-loops. Shape,
/// initial state, discount, and r_max come from `shape`.
TabularMdp build_mle_mdp(const TransitionCounts& counts, const TabularMdp& shape,
                         RewardModel rewards = RewardModel::Known);

/// Enabled pairs with at most `n_wedge` samples.
BootstrapSet bootstrap_set(const TransitionCounts& counts, std::int64_t n_wedge,
                           const TabularMdp& shape);

/// Bootstrap set over a transformed model: thresholds main pairs by their
/// counts and always bootstraps the auxiliary chain action.
BootstrapSet bootstrap_set_two_successor(const TransitionCounts& counts,
                                         std::int64_t n_wedge, const TwoSuccessorMdp& t);

/// Rewrites counts over the two-successor state space induced by the
/// successors observed in the data, enumerated in ascending state order: a
/// sample landing on the i-th observed successor becomes one sample per edge
/// of its chain path. Auxiliary ids agree with transform_mdp applied to the
/// MLE model of `counts`.
TransitionCounts transform_dataset(const TransitionCounts& counts);

/// Trajectory file format: one `s a r s'` line per step, blank line between
/// episodes.
void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_trajectories(std::istream& in);

/// Counts cache format: `c <s> <a> <s'> <n>` lines.
void write_counts(std::ostream& out, const TransitionCounts& counts);
TransitionCounts read_counts(std::istream& in, int n_states, int n_actions);

} // namespace spibb
