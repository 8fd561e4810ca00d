#include "spibb/spibb.hpp"

#include <limits>

#include "spibb/value_iteration.hpp"

namespace spibb {

namespace {

constexpr int kMaxSweeps = 10000;

StochasticPolicy assemble(const SpibbProblem& problem, const std::vector<int>& chosen) {
    const TabularMdp& m = problem.mle;
    StochasticPolicy pi = StochasticPolicy::zeros(m.n_states, m.n_actions);
    for (int s = 0; s < m.n_states; ++s) {
        double free_mass = 0.0;
        for (int a = 0; a < m.n_actions; ++a) {
            if (!m.enabled(s, a)) continue;
            if (problem.u.contains(s, a))
                pi.probs[s][a] = problem.pi_b.probs[s][a];
            else
                free_mass += problem.pi_b.probs[s][a];
        }
        if (chosen[s] >= 0) pi.probs[s][chosen[s]] += free_mass;
    }
    return pi;
}

} // namespace

StochasticPolicy spibb_policy(const SpibbProblem& problem) {
    const TabularMdp& m = problem.mle;
    problem.pi_b.validate(m);
    if (problem.u.n_states != m.n_states || problem.u.n_actions != m.n_actions)
        throw DimensionMismatchError("spibb: bootstrap set shape mismatch");

    std::vector<int> chosen(m.n_states, -2); // -2: not yet decided, -1: fully bootstrapped
    StochasticPolicy pi = problem.pi_b;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        ValueFunction v = value_iteration(m, &pi, problem.tol);
        std::vector<std::vector<double>> q = action_values(m, v);
        bool changed = false;
        for (int s = 0; s < m.n_states; ++s) {
            int best = -1;
            double best_q = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < m.n_actions; ++a) {
                if (!m.enabled(s, a) || problem.u.contains(s, a)) continue;
                if (q[s][a] > best_q) {
                    best_q = q[s][a];
                    best = a;
                }
            }
            if (best != chosen[s]) {
                chosen[s] = best;
                changed = true;
            }
        }
        if (!changed) return pi;
        pi = assemble(problem, chosen);
    }
    throw NonConvergenceError("spibb: policy iteration did not settle");
}

StochasticPolicy basic_rl_policy(const TabularMdp& mle, double tol) {
    return greedy_policy(mle, tol);
}

} // namespace spibb
