#include "spibb/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spibb {

namespace {

double min_discount_below_one(const TabularMdp& mdp) {
    double g = 1.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        double gs = mdp.discount(s);
        if (gs < 1.0) g = std::min(g, gs);
    }
    if (g >= 1.0)
        throw InvalidDiscountError("value iteration: no discounting state");
    return g;
}

// One Jacobi sweep; returns the sup-norm change.
double backup(const TabularMdp& mdp, const StochasticPolicy* policy,
              const std::vector<double>& v, std::vector<double>& out) {
    double residual = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        double gs = mdp.discount(s);
        double value;
        if (policy != nullptr) {
            value = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a) {
                double pa = policy->probs[s][a];
                if (pa == 0.0) continue;
                double q = mdp.rewards[s][a];
                for (const SuccessorEntry& e : mdp.transitions[s][a])
                    q += gs * e.prob * v[e.state];
                value += pa * q;
            }
        } else {
            value = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a) {
                if (!mdp.enabled(s, a)) continue;
                double q = mdp.rewards[s][a];
                for (const SuccessorEntry& e : mdp.transitions[s][a])
                    q += gs * e.prob * v[e.state];
                value = std::max(value, q);
            }
        }
        out[s] = value;
        residual = std::max(residual, std::abs(value - v[s]));
    }
    return residual;
}

} // namespace

ValueFunction value_iteration(const TabularMdp& mdp, const StochasticPolicy* policy,
                              double tol, std::int64_t max_iter) {
    if (!(tol > 0.0)) throw InvalidInputError("value iteration: tol must be positive");
    double g_min = min_discount_below_one(mdp);
    double threshold = tol * (1.0 - g_min) / g_min;

    std::vector<double> v(mdp.n_states, 0.0), next(mdp.n_states, 0.0);
    for (std::int64_t it = 0; it < max_iter; ++it) {
        double residual = backup(mdp, policy, v, next);
        v.swap(next);
        if (residual <= threshold) return ValueFunction{std::move(v)};
    }
    throw NonConvergenceError("value iteration: residual above threshold after max_iter sweeps");
}

double performance(const TabularMdp& mdp, const StochasticPolicy& policy, double tol) {
    return value_iteration(mdp, &policy, tol).values[mdp.initial_state];
}

std::vector<std::vector<double>> action_values(const TabularMdp& mdp,
                                               const ValueFunction& v) {
    std::vector<std::vector<double>> q(
        mdp.n_states,
        std::vector<double>(mdp.n_actions, -std::numeric_limits<double>::infinity()));
    for (int s = 0; s < mdp.n_states; ++s) {
        double gs = mdp.discount(s);
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (!mdp.enabled(s, a)) continue;
            double val = mdp.rewards[s][a];
            for (const SuccessorEntry& e : mdp.transitions[s][a])
                val += gs * e.prob * v.values[e.state];
            q[s][a] = val;
        }
    }
    return q;
}

StochasticPolicy greedy_policy(const TabularMdp& mdp, double tol) {
    ValueFunction v = value_iteration(mdp, nullptr, tol);
    std::vector<std::vector<double>> q = action_values(mdp, v);
    StochasticPolicy pi = StochasticPolicy::zeros(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        int best = -1;
        double best_q = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.n_actions; ++a) {
            if (!mdp.enabled(s, a)) continue;
            if (q[s][a] > best_q) {
                best_q = q[s][a];
                best = a;
            }
        }
        pi.probs[s][best] = 1.0;
    }
    return pi;
}

double path_probability(const TabularMdp& mdp, const std::vector<int>& path) {
    if (path.empty() || path.size() % 2 == 0)
        throw MalformedPathError("path: must be s(,a,s)* with odd length");
    for (std::size_t i = 0; i < path.size(); ++i) {
        int bound = (i % 2 == 0) ? mdp.n_states : mdp.n_actions;
        if (path[i] < 0 || path[i] >= bound)
            throw MalformedPathError("path: index out of range at position " +
                                     std::to_string(i));
    }
    double prob = 1.0;
    for (std::size_t i = 0; i + 2 < path.size(); i += 2) {
        int s = path[i], a = path[i + 1], t = path[i + 2];
        if (!mdp.enabled(s, a))
            throw MalformedPathError("path: disabled action at position " +
                                     std::to_string(i + 1));
        double step = 0.0;
        for (const SuccessorEntry& e : mdp.transitions[s][a]) {
            if (e.state == t) {
                step = e.prob;
                break;
            }
        }
        if (step == 0.0) return 0.0;
        prob *= step;
    }
    return prob;
}

double bellman_residual(const TabularMdp& mdp, const StochasticPolicy* policy,
                        const ValueFunction& v) {
    std::vector<double> next(mdp.n_states, 0.0);
    return backup(mdp, policy, v.values, next);
}

} // namespace spibb
