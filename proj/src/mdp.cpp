#include "spibb/mdp.hpp"

#include <cmath>
#include <string>

namespace spibb {

TabularMdp TabularMdp::with_shape(int n_states, int n_actions) {
    TabularMdp m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.transitions.assign(n_states, std::vector<SparseRow>(n_actions));
    m.rewards.assign(n_states, std::vector<double>(n_actions, 0.0));
    return m;
}

bool TabularMdp::is_absorbing(int s) const {
    bool any = false;
    for (int a = 0; a < n_actions; ++a) {
        const SparseRow& r = transitions[s][a];
        if (r.empty()) continue;
        any = true;
        if (r.size() != 1 || r[0].state != s) return false;
    }
    return any;
}

namespace {

// Depth-first cycle search restricted to states with discount factor 1.
// Any cycle among them would make the fixed point of the value recursion
// non-unique.
bool has_undiscounted_cycle(const TabularMdp& m) {
    std::vector<int> color(m.n_states, 0); // 0 white, 1 on stack, 2 done
    std::vector<int> stack;
    for (int root = 0; root < m.n_states; ++root) {
        if (color[root] != 0 || m.discount(root) < 1.0) continue;
        stack.push_back(root);
        while (!stack.empty()) {
            int s = stack.back();
            if (color[s] == 0) {
                color[s] = 1;
                for (int a = 0; a < m.n_actions; ++a) {
                    for (const SuccessorEntry& e : m.transitions[s][a]) {
                        if (m.discount(e.state) < 1.0) continue;
                        if (color[e.state] == 1) return true;
                        if (color[e.state] == 0) stack.push_back(e.state);
                    }
                }
            } else {
                color[s] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

} // namespace

void TabularMdp::validate() const {
    if (n_states <= 0 || n_actions <= 0)
        throw InvalidInputError("mdp: empty state or action space");
    if (initial_state < 0 || initial_state >= n_states)
        throw InvalidInputError("mdp: initial state out of range");
    if (static_cast<int>(transitions.size()) != n_states ||
        static_cast<int>(rewards.size()) != n_states)
        throw InvalidInputError("mdp: table shape mismatch");
    if (!state_discount.empty() && static_cast<int>(state_discount.size()) != n_states)
        throw InvalidInputError("mdp: discount table shape mismatch");
    if (r_max < 0.0) throw InvalidInputError("mdp: negative r_max");

    if (state_discount.empty()) {
        if (!(default_discount > 0.0 && default_discount < 1.0))
            throw InvalidDiscountError("mdp: uniform discount must be in (0,1)");
    } else {
        for (double g : state_discount)
            if (!(g > 0.0 && g <= 1.0))
                throw InvalidDiscountError("mdp: per-state discount must be in (0,1]");
    }

    for (int s = 0; s < n_states; ++s) {
        if (static_cast<int>(transitions[s].size()) != n_actions ||
            static_cast<int>(rewards[s].size()) != n_actions)
            throw InvalidInputError("mdp: table shape mismatch at state " + std::to_string(s));
        bool any_enabled = false;
        for (int a = 0; a < n_actions; ++a) {
            const SparseRow& r = transitions[s][a];
            if (r.empty()) continue;
            any_enabled = true;
            double sum = 0.0;
            int prev = -1;
            for (const SuccessorEntry& e : r) {
                if (e.state < 0 || e.state >= n_states)
                    throw InvalidInputError("mdp: successor out of range");
                if (e.state <= prev)
                    throw InvalidInputError("mdp: row not sorted by successor");
                prev = e.state;
                if (!(e.prob > 0.0 && e.prob <= 1.0 + kProbTol))
                    throw InvalidInputError("mdp: transition probability outside (0,1]");
                sum += e.prob;
            }
            if (std::abs(sum - 1.0) > kProbTol)
                throw InvalidInputError("mdp: row does not sum to 1 at (" +
                                        std::to_string(s) + "," + std::to_string(a) + ")");
            if (std::abs(rewards[s][a]) > r_max + 1e-12)
                throw InvalidInputError("mdp: reward exceeds r_max at (" +
                                        std::to_string(s) + "," + std::to_string(a) + ")");
        }
        if (!any_enabled)
            throw InvalidInputError("mdp: state " + std::to_string(s) + " has no enabled action");
    }

    if (!state_discount.empty() && has_undiscounted_cycle(*this))
        throw InvalidDiscountError("mdp: cycle through undiscounted states");
}

StochasticPolicy StochasticPolicy::zeros(int n_states, int n_actions) {
    StochasticPolicy p;
    p.probs.assign(n_states, std::vector<double>(n_actions, 0.0));
    return p;
}

StochasticPolicy StochasticPolicy::uniform(const TabularMdp& mdp) {
    StochasticPolicy p = zeros(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        int enabled = 0;
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a)) ++enabled;
        for (int a = 0; a < mdp.n_actions; ++a)
            if (mdp.enabled(s, a)) p.probs[s][a] = 1.0 / enabled;
    }
    return p;
}

void StochasticPolicy::validate(const TabularMdp& mdp) const {
    if (n_states() != mdp.n_states)
        throw DimensionMismatchError("policy: state count mismatch");
    for (int s = 0; s < mdp.n_states; ++s) {
        if (static_cast<int>(probs[s].size()) != mdp.n_actions)
            throw DimensionMismatchError("policy: action count mismatch");
        double sum = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            double p = probs[s][a];
            if (p < 0.0 || p > 1.0 + TabularMdp::kProbTol)
                throw InvalidInputError("policy: probability outside [0,1]");
            if (p > 0.0 && !mdp.enabled(s, a))
                throw InvalidInputError("policy: mass on disabled action at state " +
                                        std::to_string(s));
            sum += p;
        }
        if (std::abs(sum - 1.0) > TabularMdp::kProbTol)
            throw InvalidInputError("policy: row does not sum to 1 at state " +
                                    std::to_string(s));
    }
}

} // namespace spibb
