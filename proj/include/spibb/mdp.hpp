#pragma once

#include <cstdint>
#include <vector>

#include "spibb/errors.hpp"

namespace spibb {

/// One entry of a sparse transition row: successor state and its probability.
struct SuccessorEntry {
    int state;
    double prob;

    friend bool operator==(const SuccessorEntry&, const SuccessorEntry&) = default;
};

/// Sparse transition row, sorted by successor state. An empty row means the
/// action is disabled in that state.
using SparseRow = std::vector<SuccessorEntry>;

/// Finite MDP with sparse per-(state, action) successor rows.
///
/// Transition rows are partial: an action may be disabled in a state, in
/// which case its row is empty and its reward is meaningless. Discounting is
/// per state: `state_discount` is either empty (uniform `default_discount`
/// everywhere) or holds one factor per state. Per-state factors of exactly 1
/// are allowed only when every cycle passes through a discounting state,
/// which `validate()` checks structurally.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    int initial_state = 0;
    double default_discount = 0.95;
    double r_max = 1.0;

    /// transitions[s][a]: sorted sparse row, empty when disabled.
    std::vector<std::vector<SparseRow>> transitions;
    /// rewards[s][a]: immediate expected reward, in [-r_max, r_max] when enabled.
    std::vector<std::vector<double>> rewards;
    /// Per-state discount override; empty means uniform default_discount.
    std::vector<double> state_discount;

    bool enabled(int s, int a) const { return !transitions[s][a].empty(); }

    double discount(int s) const {
        return state_discount.empty() ? default_discount : state_discount[s];
    }

    const SparseRow& row(int s, int a) const { return transitions[s][a]; }

    /// Allocates empty transition/reward tables for the given shape.
    static TabularMdp with_shape(int n_states, int n_actions);

    /// Probability tolerance for row sums and policy rows.
    static constexpr double kProbTol = 1e-12;

    /// Checks all structural invariants; throws InvalidInputError or
    /// InvalidDiscountError on violation.
    void validate() const;

    /// True if every enabled action in `s` is a self-loop (absorbing state).
    bool is_absorbing(int s) const;
};

/// Row-stochastic state -> action distribution table. Rows must sum to 1 and
/// place zero mass on disabled actions of the owning MDP.
struct StochasticPolicy {
    /// probs[s][a]
    std::vector<std::vector<double>> probs;

    int n_states() const { return static_cast<int>(probs.size()); }
    int n_actions() const { return probs.empty() ? 0 : static_cast<int>(probs[0].size()); }

    static StochasticPolicy zeros(int n_states, int n_actions);

    /// Uniform distribution over the enabled actions of each state.
    static StochasticPolicy uniform(const TabularMdp& mdp);

    /// Checks shape against `mdp`, row sums, and zero mass on disabled
    /// actions; throws DimensionMismatchError or InvalidInputError.
    void validate(const TabularMdp& mdp) const;
};

/// Per-state value function.
struct ValueFunction {
    std::vector<double> values;

    double at(int s) const { return values[s]; }
};

} // namespace spibb
