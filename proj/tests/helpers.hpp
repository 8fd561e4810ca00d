#pragma once

#include <random>
#include <vector>

#include "spibb/mdp.hpp"

namespace spibb::test {

/// Gaussian elimination with partial pivoting; A is row-major n x n.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

/// Policy-evaluation oracle: solves (I - diag(gamma) P_pi) V = R_pi directly.
inline std::vector<double> linear_policy_values(const TabularMdp& m,
                                                const StochasticPolicy& pi) {
    const int n = m.n_states;
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int s = 0; s < n; ++s) {
        a[s][s] = 1.0;
        for (int act = 0; act < m.n_actions; ++act) {
            double w = pi.probs[s][act];
            if (w == 0.0) continue;
            b[s] += w * m.rewards[s][act];
            for (const SuccessorEntry& e : m.transitions[s][act])
                a[s][e.state] -= m.discount(s) * w * e.prob;
        }
    }
    return solve_dense(std::move(a), std::move(b));
}

/// Performance oracle via the discounted occupancy measure: solves the
/// transposed system d^T (I - diag(gamma) P_pi) = e_iota^T and returns
/// sum_s d(s) R_pi(s). Requires uniform discounting to be meaningful.
inline double occupancy_performance(const TabularMdp& m, const StochasticPolicy& pi) {
    const int n = m.n_states;
    std::vector<std::vector<double>> at(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    b[m.initial_state] = 1.0;
    for (int s = 0; s < n; ++s) {
        at[s][s] += 1.0;
        for (int act = 0; act < m.n_actions; ++act) {
            double w = pi.probs[s][act];
            if (w == 0.0) continue;
            for (const SuccessorEntry& e : m.transitions[s][act])
                at[e.state][s] -= m.discount(s) * w * e.prob;
        }
    }
    std::vector<double> d = solve_dense(std::move(at), std::move(b));
    double rho = 0.0;
    for (int s = 0; s < n; ++s) {
        double r_pi = 0.0;
        for (int act = 0; act < m.n_actions; ++act)
            r_pi += pi.probs[s][act] * m.rewards[s][act];
        rho += d[s] * r_pi;
    }
    return rho;
}

/// Random MDP with dense rows (every action enabled, every successor
/// possible). Rewards in [-1, 1].
inline TabularMdp random_dense_mdp(std::mt19937_64& rng, int n_states, int n_actions,
                                   double gamma = 0.9) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TabularMdp m = TabularMdp::with_shape(n_states, n_actions);
    m.default_discount = gamma;
    m.r_max = 1.0;
    m.initial_state = 0;
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            SparseRow row;
            double total = 0.0;
            for (int t = 0; t < n_states; ++t) {
                double w = 0.05 + unit(rng);
                row.push_back({t, w});
                total += w;
            }
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < row.size(); ++i) {
                row[i].prob /= total;
                sum += row[i].prob;
            }
            row.back().prob = 1.0 - sum;
            m.transitions[s][a] = std::move(row);
            m.rewards[s][a] = 2.0 * unit(rng) - 1.0;
        }
    m.validate();
    return m;
}

/// Random MDP with sparse rows and possibly disabled actions (each state
/// keeps at least one action).
inline TabularMdp random_sparse_mdp(std::mt19937_64& rng, int n_states, int n_actions,
                                    double gamma = 0.9) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> succ_count(1, n_states);
    TabularMdp m = TabularMdp::with_shape(n_states, n_actions);
    m.default_discount = gamma;
    m.r_max = 1.0;
    for (int s = 0; s < n_states; ++s) {
        int enabled = 0;
        for (int a = 0; a < n_actions; ++a) {
            bool last_chance = a == n_actions - 1 && enabled == 0;
            if (!last_chance && unit(rng) < 0.25) continue;
            ++enabled;
            int k = succ_count(rng);
            std::vector<int> ids(n_states);
            for (int i = 0; i < n_states; ++i) ids[i] = i;
            std::shuffle(ids.begin(), ids.end(), rng);
            ids.resize(k);
            std::sort(ids.begin(), ids.end());
            SparseRow row;
            double total = 0.0;
            for (int t : ids) {
                double w = 0.05 + unit(rng);
                row.push_back({t, w});
                total += w;
            }
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < row.size(); ++i) {
                row[i].prob /= total;
                sum += row[i].prob;
            }
            row.back().prob = 1.0 - sum;
            m.transitions[s][a] = std::move(row);
            m.rewards[s][a] = 2.0 * unit(rng) - 1.0;
        }
    }
    m.validate();
    return m;
}

/// Random policy over the enabled actions of `m`.
inline StochasticPolicy random_policy(std::mt19937_64& rng, const TabularMdp& m) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StochasticPolicy pi = StochasticPolicy::zeros(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
        double total = 0.0;
        for (int a = 0; a < m.n_actions; ++a)
            if (m.enabled(s, a)) {
                pi.probs[s][a] = 0.05 + unit(rng);
                total += pi.probs[s][a];
            }
        for (int a = 0; a < m.n_actions; ++a) pi.probs[s][a] /= total;
    }
    return pi;
}

/// The worked five-state example: state 0 has a four-successor action 0
/// (self 0.5, s1 0.2, s2 0.2, s3 0.1) with reward 1 and a two-successor
/// action 1 (s3 0.2, s4 0.8); states 1..4 are absorbing.
inline TabularMdp example_fan_mdp(double gamma = 0.95) {
    TabularMdp m = TabularMdp::with_shape(5, 2);
    m.default_discount = gamma;
    m.r_max = 1.0;
    m.initial_state = 0;
    m.transitions[0][0] = {{0, 0.5}, {1, 0.2}, {2, 0.2}, {3, 0.1}};
    m.rewards[0][0] = 1.0;
    m.transitions[0][1] = {{3, 0.2}, {4, 0.8}};
    m.rewards[0][1] = 0.0;
    for (int s = 1; s < 5; ++s) m.transitions[s][0] = {{s, 1.0}};
    m.validate();
    return m;
}

} // namespace spibb::test
