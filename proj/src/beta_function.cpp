#include "spibb/beta_function.hpp"

#include <cmath>
#include <limits>

#include "spibb/errors.hpp"

namespace spibb {

namespace {

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Modified Lentz evaluation of the continued fraction for I_x(a,b).
// Converges quickly for x below the switch point (a+1)/(a+b+2); near the
// distribution mean with very large parameters it needs O(sqrt(a)) terms,
// hence the generous iteration cap.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 3e-16;
    constexpr int kMaxIter = 20000;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double coef = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + coef * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + coef / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + coef * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + coef / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw NonConvergenceError("incomplete beta: continued fraction did not converge");
}

} // namespace

double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("incomplete beta: parameters must be positive");
    if (std::isnan(x) || x < 0.0 || x > 1.0)
        throw DomainError("incomplete beta: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    double ln_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

namespace {

double inv_reg_inc_beta_core(double p, double a, double b) {
    constexpr double kTol = 1e-12;
    constexpr int kMaxIter = 200;
    double lo = 0.0, hi = 1.0;
    double x = a / (a + b); // mean as starting point

    for (int it = 0; it < kMaxIter; ++it) {
        double f = reg_inc_beta(x, a, b) - p;
        if (std::abs(f) <= kTol) return x;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        // Newton step, falling back to bisection when it leaves the bracket.
        double dfdx = beta_pdf(x, a, b);
        double next = dfdx > 0.0 ? x - f / dfdx : x;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        // The bracket can collapse to adjacent doubles before |f| reaches
        // tolerance when the density is extremely steep; the midpoint is then
        // the best representable root.
        if (next == x || hi - lo <= std::numeric_limits<double>::epsilon() * x)
            return x;
        x = next;
    }
    throw NonConvergenceError("inverse incomplete beta: no convergence in 200 iterations");
}

} // namespace

double inv_reg_inc_beta(double p, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("inverse incomplete beta: parameters must be positive");
    if (!(p > 0.0) || !(p < 1.0))
        throw DomainError("inverse incomplete beta: p must be in (0,1)");
    // Invert the smaller tail; quantiles near 1 are poorly resolved by
    // doubles, near 0 they are not.
    if (p > 0.5) return 1.0 - inv_reg_inc_beta_core(1.0 - p, b, a);
    return inv_reg_inc_beta_core(p, a, b);
}

} // namespace spibb
