#include "spibb/two_successor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "spibb/mdp_io.hpp"
#include "spibb/value_iteration.hpp"

namespace spibb {

namespace {

std::int64_t aux_key(int s, int a, int position) {
    return (static_cast<std::int64_t>(s) << 32) |
           (static_cast<std::int64_t>(a) << 16) | position;
}

constexpr double kResidualFloor = 1e-15;

} // namespace

int TwoSuccessorMdp::aux_state(int s, int a, int position) const {
    auto it = aux_lookup_.find(aux_key(s, a, position));
    return it == aux_lookup_.end() ? -1 : it->second;
}

std::vector<int> TwoSuccessorMdp::chain_path(int s, int a, int index, int k) const {
    std::vector<int> path{s, a};
    if (k > 2 && index > 1) {
        int last = std::min(index, k - 1);
        for (int i = 2; i <= last; ++i) {
            path.push_back(aux_state(s, a, i));
            path.push_back(tau_action);
        }
    }
    return path;
}

TwoSuccessorMdp transform_mdp(const TabularMdp& m) {
    m.validate();
    if (!m.state_discount.empty())
        throw InvalidInputError("transform: input must have a uniform discount");

    TwoSuccessorMdp t;
    t.n_main = m.n_states;
    t.tau_action = m.n_actions;

    // First pass: assign aux ids per split row, in (state, action) order.
    int next_id = m.n_states;
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            int k = static_cast<int>(m.transitions[s][a].size());
            for (int i = 2; i <= k - 1; ++i) {
                t.aux_lookup_[aux_key(s, a, i)] = next_id;
                t.aux_origin.push_back({s, a, i});
                ++next_id;
            }
        }
    }

    TabularMdp out = TabularMdp::with_shape(next_id, m.n_actions + 1);
    out.initial_state = m.initial_state;
    out.default_discount = m.default_discount;
    out.r_max = m.r_max;
    out.state_discount.assign(next_id, 1.0);
    for (int s = 0; s < m.n_states; ++s) out.state_discount[s] = m.default_discount;

    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            const SparseRow& row = m.transitions[s][a];
            if (row.empty()) continue;
            out.rewards[s][a] = m.rewards[s][a];
            int k = static_cast<int>(row.size());
            if (k <= 2) {
                out.transitions[s][a] = row;
                continue;
            }
            double total = 0.0;
            for (const SuccessorEntry& e : row) total += e.prob;
            if (std::abs(total - 1.0) > TabularMdp::kProbTol)
                throw InvalidInputError("transform: row does not normalize");

            // residual[i] = p_i + ... + p_{k-1} (0-based), built backwards so
            // the conditional splits telescope to the original probabilities.
            std::vector<double> residual(k + 1, 0.0);
            for (int i = k - 1; i >= 0; --i) residual[i] = residual[i + 1] + row[i].prob;

            out.transitions[s][a] = {{row[0].state, row[0].prob},
                                     {t.aux_state(s, a, 2), 1.0 - row[0].prob}};
            for (int i = 2; i <= k - 1; ++i) {
                int x = t.aux_state(s, a, i);
                double denom = residual[i - 1];
                if (denom < kResidualFloor)
                    throw InvalidInputError("transform: vanishing residual probability");
                double take = row[i - 1].prob / denom;
                if (i < k - 1) {
                    out.transitions[x][t.tau_action] = {{row[i - 1].state, take},
                                                        {t.aux_state(s, a, i + 1), 1.0 - take}};
                } else {
                    // Final chain state splits onto the last two successors in
                    // proportion to their original probabilities.
                    out.transitions[x][t.tau_action] = {{row[k - 2].state, take},
                                                        {row[k - 1].state, row[k - 1].prob / denom}};
                }
                out.rewards[x][t.tau_action] = 0.0;
            }
        }
    }

    t.mdp = std::move(out);
    t.mdp.validate();
    return t;
}

StochasticPolicy extend_policy(const StochasticPolicy& pi, const TwoSuccessorMdp& t) {
    if (pi.n_states() != t.n_main || pi.n_actions() != t.tau_action)
        throw DimensionMismatchError("extend_policy: policy shape does not match main states");
    StochasticPolicy out = StochasticPolicy::zeros(t.mdp.n_states, t.mdp.n_actions);
    for (int s = 0; s < t.n_main; ++s)
        for (int a = 0; a < pi.n_actions(); ++a) out.probs[s][a] = pi.probs[s][a];
    for (int x = t.n_main; x < t.mdp.n_states; ++x) out.probs[x][t.tau_action] = 1.0;
    return out;
}

PreservationReport verify_preservation(const TabularMdp& m, const TwoSuccessorMdp& t,
                                       const StochasticPolicy& pi, double tol) {
    PreservationReport report;
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a) {
            const SparseRow& row = m.transitions[s][a];
            int k = static_cast<int>(row.size());
            for (int i = 1; i <= k; ++i) {
                std::vector<int> path = t.chain_path(s, a, i, k);
                path.push_back(row[i - 1].state);
                double gap = std::abs(row[i - 1].prob - path_probability(t.mdp, path));
                report.max_prob_gap = std::max(report.max_prob_gap, gap);
            }
        }
    }
    StochasticPolicy extended = extend_policy(pi, t);
    double rho_m = performance(m, pi, tol);
    double rho_t = performance(t.mdp, extended, tol);
    report.perf_gap = std::abs(rho_m - rho_t);
    return report;
}

void write_two_successor(const std::string& mdp_path, const std::string& map_path,
                         const TwoSuccessorMdp& t) {
    write_mdp_file(mdp_path, t.mdp);
    std::ofstream out(map_path);
    if (!out) throw IoError("cannot open for writing: " + map_path);
    for (std::size_t i = 0; i < t.aux_origin.size(); ++i) {
        const TwoSuccessorMdp::AuxOrigin& o = t.aux_origin[i];
        out << "aux " << (t.n_main + static_cast<int>(i)) << ' ' << o.state << ' '
            << o.action << ' ' << o.position << '\n';
    }
    if (!out) throw IoError("write failed: " + map_path);
}

} // namespace spibb
