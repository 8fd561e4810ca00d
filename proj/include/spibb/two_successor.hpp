#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spibb/mdp.hpp"

namespace spibb {

/// MDP in which every enabled pair has at most two successors, produced by
/// splitting wide transition rows into chains of auxiliary states.
///
/// Main states keep their original ids (0..n_main-1); auxiliary states
/// follow. Auxiliary states enable exactly one action, `tau_action`, carry
/// zero reward and discount factor 1; main states keep the original uniform
/// discount and never enable `tau_action`.
struct TwoSuccessorMdp {
    TabularMdp mdp;
    int n_main = 0;
    int tau_action = 0;

    /// Provenance of an auxiliary state: it is the `position`-th chain state
    /// (positions run 2..k-1) of the split row (state, action).
    struct AuxOrigin {
        int state;
        int action;
        int position;
    };
    /// Indexed by aux id - n_main.
    std::vector<AuxOrigin> aux_origin;

    /// Aux id for chain position i of (s,a), or -1 when absent.
    int aux_state(int s, int a, int position) const;

    /// The unique path <s,a,...,successor> realizing the original transition,
    /// as an alternating state/action sequence usable with path_probability.
    /// `index` is the rank of the successor in the ascending successor order
    /// of the original row, `k` the original row's successor count.
    std::vector<int> chain_path(int s, int a, int index, int k) const;

private:
    std::unordered_map<std::int64_t, int> aux_lookup_;
    friend TwoSuccessorMdp transform_mdp(const TabularMdp&);
};

/// Splits every transition row with more than two successors into a chain of
/// binary choices. Successors are enumerated in ascending state order; the
/// conditional continuation probabilities are formed from suffix sums of the
/// row, so each original transition corresponds to a unique chain path of
/// equal probability. Requires a uniform discount below 1.
TwoSuccessorMdp transform_mdp(const TabularMdp& m);

/// Lifts a policy on the original states: rows are copied on main states and
/// auxiliary states put all mass on the chain action.
StochasticPolicy extend_policy(const StochasticPolicy& pi, const TwoSuccessorMdp& t);

struct PreservationReport {
    double max_prob_gap = 0.0;
    double perf_gap = 0.0;

    bool passed(double tol) const { return max_prob_gap <= tol && perf_gap <= tol; }
};

/// Measures how well `t` preserves `m`: the largest gap between an original
/// transition probability and its chain-path probability, and the difference
/// in performance of `pi` (extended on `t`).
PreservationReport verify_preservation(const TabularMdp& m, const TwoSuccessorMdp& t,
                                       const StochasticPolicy& pi, double tol = 1e-9);

/// Writes the transformed model in the MDP text format plus a sidecar map
/// with one `aux <x_id> <s> <a> <i>` line per auxiliary state.
void write_two_successor(const std::string& mdp_path, const std::string& map_path,
                         const TwoSuccessorMdp& t);

} // namespace spibb
