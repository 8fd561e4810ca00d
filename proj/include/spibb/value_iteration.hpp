#pragma once

#include <cstdint>
#include <vector>

#include "spibb/mdp.hpp"

namespace spibb {

/// Computes state values by successive Bellman backups with per-state
/// discounting.
///
/// With `policy == nullptr` the optimal values are computed; otherwise the
/// given policy is evaluated. Iteration stops once the sup-norm backup
/// residual drops below tol * (1 - g_min) / g_min, where g_min is the
/// smallest per-state discount below 1; the returned values satisfy that
/// residual bound. Throws NonConvergenceError when `max_iter` sweeps are
/// exhausted first.
ValueFunction value_iteration(const TabularMdp& mdp,
                              const StochasticPolicy* policy = nullptr,
                              double tol = 1e-9,
                              std::int64_t max_iter = 1000000);

/// Value of the initial state under `policy`.
double performance(const TabularMdp& mdp, const StochasticPolicy& policy,
                   double tol = 1e-9);

/// Deterministic policy that is greedy for the optimal values; ties go to
/// the lowest action index.
StochasticPolicy greedy_policy(const TabularMdp& mdp, double tol = 1e-9);

/// Action values Q(s,a) = R(s,a) + gamma(s) * sum_s' P(s'|s,a) V(s') for
/// enabled pairs; disabled pairs get -infinity.
std::vector<std::vector<double>> action_values(const TabularMdp& mdp,
                                               const ValueFunction& v);

/// Probability of following an alternating state/action/.../state sequence.
/// Returns 0 when some step has probability 0; throws MalformedPathError on
/// out-of-range indices, disabled actions, or an even-length sequence.
double path_probability(const TabularMdp& mdp, const std::vector<int>& path);

/// One extra Bellman backup of `v`; returns the sup-norm residual. Used to
/// check the advertised stopping guarantee.
double bellman_residual(const TabularMdp& mdp, const StochasticPolicy* policy,
                        const ValueFunction& v);

} // namespace spibb
