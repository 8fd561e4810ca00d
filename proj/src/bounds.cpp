#include "spibb/bounds.hpp"

#include <cmath>

#include "spibb/beta_function.hpp"

namespace spibb {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Ceiling with a one-part-in-1e12 backoff: expressions whose exact value is
// an integer (round-trips through a zeta) would otherwise round up spuriously.
std::int64_t ceil_count(double x) {
    if (!(x >= 0.0)) throw DomainError("sample threshold: negative or NaN");
    if (x >= 9.2e18) throw DomainError("sample threshold: overflow");
    return static_cast<std::int64_t>(std::ceil(x - 1e-12 * std::max(1.0, x)));
}

double concentration_scale(const BoundParams& p) {
    return 4.0 * p.v_max / (1.0 - p.gamma);
}

// Positive loss budget left for the concentration term.
double loss_budget(const BoundParams& p, double zeta) {
    double budget = zeta - p.rho_tilde;
    if (!(budget > 0.0))
        throw DomainError("sample threshold: loss budget must be positive after "
                          "subtracting the performance correction");
    return budget;
}

std::int64_t checked_n(std::int64_t n_wedge) {
    if (n_wedge < 1) throw DomainError("admissible loss: sample count must be >= 1");
    return n_wedge;
}

} // namespace

void BoundParams::validate() const {
    if (n_states < 1 || n_actions < 1)
        throw DomainError("bound params: counts must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("bound params: gamma must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("bound params: delta must be in (0,1)");
    if (!(v_max > 0.0)) throw DomainError("bound params: v_max must be positive");
}

double log_term_full(const BoundParams& p) {
    p.validate();
    double s = static_cast<double>(p.n_states);
    double a = static_cast<double>(p.n_actions);
    return std::log(2.0 * s * a / p.delta) + s * kLn2;
}

double log_term_two_successor(const BoundParams& p) {
    p.validate();
    double s = static_cast<double>(p.n_states);
    double a = static_cast<double>(p.n_actions);
    return std::log(8.0) + 2.0 * std::log(s) + 2.0 * std::log(a) - std::log(p.delta);
}

double zeta_spi(const BoundParams& p, std::int64_t n_wedge) {
    double n = static_cast<double>(checked_n(n_wedge));
    return 2.0 * p.gamma * p.v_max / (1.0 - p.gamma) *
           std::sqrt(2.0 / n * log_term_full(p));
}

std::int64_t nmin_spi(const BoundParams& p, double zeta) {
    if (!(zeta > 0.0)) throw DomainError("sample threshold: zeta must be positive");
    double denom = zeta * zeta * (1.0 - p.gamma) * (1.0 - p.gamma);
    return ceil_count(8.0 * p.v_max * p.v_max / denom * log_term_full(p));
}

double zeta_spibb(const BoundParams& p, std::int64_t n_wedge) {
    double n = static_cast<double>(checked_n(n_wedge));
    return concentration_scale(p) * std::sqrt(2.0 / n * log_term_full(p)) + p.rho_tilde;
}

std::int64_t nmin_spibb(const BoundParams& p, double zeta) {
    double budget = loss_budget(p, zeta);
    double denom = budget * budget * (1.0 - p.gamma) * (1.0 - p.gamma);
    return ceil_count(32.0 * p.v_max * p.v_max / denom * log_term_full(p));
}

double zeta_2s(const BoundParams& p, std::int64_t n_wedge) {
    double n = static_cast<double>(checked_n(n_wedge));
    return concentration_scale(p) * std::sqrt(2.0 / n * log_term_two_successor(p)) +
           p.rho_tilde;
}

std::int64_t nmin_2s(const BoundParams& p, double zeta) {
    double budget = loss_budget(p, zeta);
    double denom = budget * budget * (1.0 - p.gamma) * (1.0 - p.gamma);
    return ceil_count(32.0 * p.v_max * p.v_max / denom * log_term_two_successor(p));
}

double interval_width(std::int64_t n, double delta_t, const BetaPrior& prior) {
    if (n < 0) throw DomainError("interval width: n must be >= 0");
    if (!(delta_t > 0.0 && delta_t < 1.0))
        throw DomainError("interval width: delta_t must be in (0,1)");
    if (!(prior.alpha1 > 0.0 && prior.alpha2 > 0.0))
        throw DomainError("interval width: prior parameters must be positive");
    double shape = (static_cast<double>(n) + prior.alpha1 + prior.alpha2) / 2.0;
    return 1.0 - 2.0 * inv_reg_inc_beta(delta_t / 2.0, shape, shape);
}

namespace {

double per_pair_delta(const BoundParams& p) {
    double s = static_cast<double>(p.n_states);
    double a = static_cast<double>(p.n_actions);
    return p.delta / (s * s * a * a);
}

// Least n in [0, hi] with interval_width(n, delta_t) <= target; widens the
// bracket by doubling when hi is not wide enough.
std::int64_t least_n_for_width(double target, double delta_t, std::int64_t hi) {
    if (!(target > 0.0)) throw DomainError("width search: target must be positive");
    if (hi < 1) hi = 1;
    int doublings = 0;
    while (interval_width(hi, delta_t) > target) {
        if (++doublings > 64)
            throw InfeasibleError("width search: no bracket below target width");
        hi *= 2;
    }
    std::int64_t lo = 0;
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (interval_width(mid, delta_t) <= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

} // namespace

double zeta_beta(const BoundParams& p, std::int64_t n_wedge) {
    if (n_wedge < 0) throw DomainError("admissible loss: sample count must be >= 0");
    p.validate();
    return concentration_scale(p) * interval_width(n_wedge, per_pair_delta(p)) +
           p.rho_tilde;
}

std::int64_t nmin_beta(const BoundParams& p, double zeta) {
    double target = loss_budget(p, zeta) / concentration_scale(p);
    return least_n_for_width(target, per_pair_delta(p), nmin_2s(p, zeta));
}

std::int64_t nmin_ksucc(const BoundParams& p, double zeta, int k) {
    if (k < 2) throw DomainError("sample threshold: branching factor must be >= 2");
    if (!(zeta > 0.0)) throw DomainError("sample threshold: zeta must be positive");
    p.validate();
    double s = static_cast<double>(p.n_states);
    double a = static_cast<double>(p.n_actions);
    double log_term = std::log(2.0 * s * s * a * a / ((k - 1.0) * p.delta)) + k * kLn2;
    double denom = zeta * zeta * (1.0 - p.gamma) * (1.0 - p.gamma);
    return ceil_count(32.0 * p.v_max * p.v_max / denom * log_term);
}

std::int64_t convert_nmin(const BoundParams& p, std::int64_t n_spibb, BoundKind target) {
    if (n_spibb < 1) throw DomainError("conversion: n_spibb must be >= 1");
    p.validate();
    double n = static_cast<double>(n_spibb);
    if (target == BoundKind::TwoSuccessor)
        return ceil_count(n * log_term_two_successor(p) / log_term_full(p));
    double width_target = std::sqrt(2.0 / n * log_term_full(p));
    std::int64_t hi = ceil_count(n * log_term_two_successor(p) / log_term_full(p));
    return least_n_for_width(width_target, per_pair_delta(p), hi);
}

std::vector<SweepRow> sweep_states(const BoundParams& base, double zeta,
                                   std::int64_t lo, std::int64_t hi, std::int64_t step) {
    if (lo < 1 || hi < lo || step < 1)
        throw DomainError("state sweep: need 1 <= lo <= hi and step >= 1");
    std::vector<SweepRow> rows;
    for (std::int64_t s = lo; s <= hi; s += step) {
        BoundParams p = base;
        p.n_states = s;
        rows.push_back({s, nmin_spi(p, zeta), nmin_spibb(p, zeta), nmin_2s(p, zeta),
                        nmin_beta(p, zeta)});
    }
    return rows;
}

} // namespace spibb
