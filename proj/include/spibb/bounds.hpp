#pragma once

#include <cstdint>
#include <vector>

#include "spibb/errors.hpp"

namespace spibb {

/// Problem parameters shared by every admissible-performance-loss formula.
///
/// `rho_tilde` is the performance correction -rho(improved) + rho(behavior)
/// measured on the estimated model; it defaults to 0 for a-priori bounds.
struct BoundParams {
    std::int64_t n_states = 1;
    std::int64_t n_actions = 1;
    double v_max = 1.0;
    double gamma = 0.95;
    double delta = 0.1;
    double rho_tilde = 0.0;

    void validate() const;
};

/// Beta-distributed prior over a binary outcome probability.
struct BetaPrior {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
};

/// ln(2 |S| |A| 2^{|S|} / delta), with the exponential term expanded as
/// |S| ln 2 so large state counts cannot overflow.
double log_term_full(const BoundParams& p);

/// ln(8 |S|^2 |A|^2 / delta), the branching-factor-2 counterpart.
double log_term_two_successor(const BoundParams& p);

// Admissible performance loss for a given per-pair sample count, and the
// smallest sample count (rounded up) for a given admissible loss. The four
// families use the same concentration template and differ in constants and
// log terms; the *_spi pair requires the threshold in every pair rather than
// acting as a bootstrap cutoff.
double zeta_spi(const BoundParams& p, std::int64_t n_wedge);
std::int64_t nmin_spi(const BoundParams& p, double zeta);

double zeta_spibb(const BoundParams& p, std::int64_t n_wedge);
std::int64_t nmin_spibb(const BoundParams& p, double zeta);

double zeta_2s(const BoundParams& p, std::int64_t n_wedge);
std::int64_t nmin_2s(const BoundParams& p, double zeta);

/// Width of the smallest interval that contains a binomial success
/// probability with posterior mass 1 - delta_t after n observations:
/// 1 - 2 * I^{-1}_{delta_t/2}((n + a1 + a2)/2, (n + a1 + a2)/2). The default
/// prior is uniform (a1 = a2 = 1).
double interval_width(std::int64_t n, double delta_t, const BetaPrior& prior = {});

double zeta_beta(const BoundParams& p, std::int64_t n_wedge);

/// Smallest sample count whose beta-based loss is at most `zeta`, found by
/// binary search over the monotone interval width. The initial bracket is
/// [0, nmin_2s]; a doubling fallback widens it if ever necessary.
std::int64_t nmin_beta(const BoundParams& p, double zeta);

/// Sample threshold when the branching factor is capped at k instead of 2.
std::int64_t nmin_ksucc(const BoundParams& p, double zeta, int k);

enum class BoundKind { TwoSuccessor, Beta };

/// Sample threshold that matches the concentration term implied by running
/// with `n_spibb` under the full-branching bound. The performance correction
/// cancels because both sides are evaluated on the same estimated model.
std::int64_t convert_nmin(const BoundParams& p, std::int64_t n_spibb, BoundKind target);

struct SweepRow {
    std::int64_t states;
    std::int64_t n_spi;
    std::int64_t n_spibb;
    std::int64_t n_2s;
    std::int64_t n_beta;
};

/// Thresholds for each state count in [lo, hi] stepping by `step`.
std::vector<SweepRow> sweep_states(const BoundParams& base, double zeta,
                                   std::int64_t lo, std::int64_t hi, std::int64_t step);

} // namespace spibb
