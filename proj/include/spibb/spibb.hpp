#pragma once

#include "spibb/data.hpp"
#include "spibb/mdp.hpp"

namespace spibb {

/// A constrained improvement problem: optimize on the estimated model while
/// copying the behavior policy on every bootstrapped pair.
struct SpibbProblem {
    TabularMdp mle;
    StochasticPolicy pi_b;
    BootstrapSet u;
    double tol = 1e-9;
};

/// Policy iteration with a constrained greedy step: each state keeps the
/// behavior probabilities of its bootstrapped actions unchanged and moves all
/// remaining mass onto the non-bootstrapped action with the best action
/// value, ties to the lowest index. The result follows pi_b exactly on the
/// bootstrap set and its estimated performance is at least that of pi_b
/// (up to tol). Throws NonConvergenceError if the sweep cap is exhausted.
StochasticPolicy spibb_policy(const SpibbProblem& problem);

/// Unconstrained dynamic programming on the estimated model.
StochasticPolicy basic_rl_policy(const TabularMdp& mle, double tol = 1e-9);

} // namespace spibb
