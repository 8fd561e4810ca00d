#pragma once

#include <random>

#include "helpers.hpp"
#include "spibb/data.hpp"

namespace spibb::test {

struct ConstrainedProblem {
    TabularMdp mle;
    StochasticPolicy pi_b;
    BootstrapSet u;
};

inline ConstrainedProblem random_constrained_problem(std::mt19937_64& rng, int n_states,
                                                     int n_actions, double bootstrap_rate) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ConstrainedProblem p;
    p.mle = random_dense_mdp(rng, n_states, n_actions, 0.9);
    p.pi_b = random_policy(rng, p.mle);
    p.u.n_states = n_states;
    p.u.n_actions = n_actions;
    p.u.bootstrapped.assign(n_states, std::vector<char>(n_actions, 0));
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a)
            p.u.bootstrapped[s][a] = unit(rng) < bootstrap_rate ? 1 : 0;
    return p;
}

/// Exhaustive search over every policy that copies the behavior probabilities
/// on bootstrapped pairs and puts the remaining mass on one non-bootstrapped
/// action per state; evaluation by direct linear solve.
inline double best_constrained_performance(const ConstrainedProblem& p) {
    const TabularMdp& m = p.mle;
    std::vector<std::vector<int>> choices(m.n_states);
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_actions; ++a)
            if (m.enabled(s, a) && !p.u.contains(s, a)) choices[s].push_back(a);
        if (choices[s].empty()) choices[s].push_back(-1);
    }
    std::vector<std::size_t> pick(m.n_states, 0);
    double best = -1e300;
    for (;;) {
        StochasticPolicy pi = StochasticPolicy::zeros(m.n_states, m.n_actions);
        for (int s = 0; s < m.n_states; ++s) {
            double free_mass = 0.0;
            for (int a = 0; a < m.n_actions; ++a) {
                if (!m.enabled(s, a)) continue;
                if (p.u.contains(s, a))
                    pi.probs[s][a] = p.pi_b.probs[s][a];
                else
                    free_mass += p.pi_b.probs[s][a];
            }
            int a = choices[s][pick[s]];
            if (a >= 0) pi.probs[s][a] += free_mass;
        }
        best = std::max(best, linear_policy_values(m, pi)[m.initial_state]);

        int s = 0;
        while (s < m.n_states && ++pick[s] == choices[s].size()) pick[s++] = 0;
        if (s == m.n_states) break;
    }
    return best;
}

} // namespace spibb::test
