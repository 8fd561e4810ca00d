#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "spibb/mdp.hpp"

namespace spibb {

/// Named benchmark environment plus its numeric parameters. Unset keys fall
/// back to the environment's defaults; unknown keys are rejected.
struct EnvSpec {
    std::string name;
    std::map<std::string, double> params;

    double get(const std::string& key, double fallback) const;
};

/// Default parameterization for `name`; throws UnknownEnvError.
EnvSpec default_env_spec(const std::string& name);

/// Flat `key value` text, first line `env <name>`.
EnvSpec read_env_spec(std::istream& in);
EnvSpec read_env_spec_file(const std::string& path);
void write_env_spec(std::ostream& out, const EnvSpec& spec);

/// Builds the benchmark model for `spec`:
///   gridworld           stochastic 5x5 grid, 25 states, 4 actions
///   wet_chicken         discretized river, 25 states, 5 actions
///   resource_gathering  two resources with enemies, 376 states, 4 actions
/// Construction is deterministic in the spec.
TabularMdp build_env(const EnvSpec& spec);

/// Behavior policy from tabular Q-learning with softmax action selection at
/// temperature `temp`; the returned policy is softmax(Q / temp) over enabled
/// actions. Deterministic for a fixed seed.
StochasticPolicy behavior_softmax_q(const TabularMdp& mdp, std::int64_t q_steps,
                                    double lr, double temp, std::uint64_t rng_seed);

/// Behavior policy that plays the optimal action with probability
/// 1 - epsilon * (#other enabled actions) and every other enabled action with
/// probability epsilon.
StochasticPolicy behavior_perturbed_optimal(const TabularMdp& mdp, double epsilon);

} // namespace spibb
