#pragma once

#include <iosfwd>
#include <string>

#include "spibb/mdp.hpp"

namespace spibb {

/// Writes `d` with enough digits to round-trip exactly ("%.17g").
std::string format_double(double d);

/// MDP text format:
///   mdp <n_states> <n_actions> <initial> <gamma> <r_max>
///   t <s> <a> <s'> <prob>      one line per transition
///   r <s> <a> <reward>         one line per enabled pair
///   g <s> <gamma_s>            optional per-state discount override
/// Tokens are whitespace-separated; `#` starts a comment.
void write_mdp(std::ostream& out, const TabularMdp& mdp);
void write_mdp_file(const std::string& path, const TabularMdp& mdp);

TabularMdp read_mdp(std::istream& in);
TabularMdp read_mdp_file(const std::string& path);

/// Policy text format: `p <s> <a> <prob>`, zero entries omitted.
void write_policy(std::ostream& out, const StochasticPolicy& policy);
void write_policy_file(const std::string& path, const StochasticPolicy& policy);

StochasticPolicy read_policy(std::istream& in, int n_states, int n_actions);
StochasticPolicy read_policy_file(const std::string& path, int n_states, int n_actions);

} // namespace spibb
