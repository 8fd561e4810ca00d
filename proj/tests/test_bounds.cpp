#include <doctest.h>

#include <cmath>
#include <random>

#include "spibb/beta_function.hpp"
#include "spibb/bounds.hpp"

using namespace spibb;

namespace {

BoundParams params(std::int64_t s, std::int64_t a, double delta = 0.1,
                   double v_max = 1.0, double gamma = 0.95) {
    return BoundParams{s, a, v_max, gamma, delta, 0.0};
}

} // namespace

TEST_CASE("thresholds: high-precision spot value for the full-branching bound") {
    // ceil(8 Vmax^2 / (zeta^2 (1-gamma)^2) * ln(2*100*4*2^100/0.1)), evaluated
    // independently at 60-digit precision.
    CHECK(nmin_spi(params(100, 4), 0.1) == 25056613);
    CHECK(nmin_spibb(params(100, 4), 0.1) == 100226452);
    CHECK(nmin_2s(params(100, 4), 0.1) == 20947144);
}

TEST_CASE("thresholds: loss halves when the sample count quadruples") {
    BoundParams p = params(25, 4);
    double z1 = zeta_spibb(p, 100);
    double z4 = zeta_spibb(p, 400);
    CHECK(z4 == doctest::Approx(z1 / 2.0).epsilon(1e-12));
    CHECK(zeta_spi(p, 50) == doctest::Approx(std::sqrt(2.0) * zeta_spi(p, 100)));
}

TEST_CASE("thresholds: the bootstrapped bound needs four times the plain samples") {
    BoundParams p = params(25, 4);
    for (double zeta : {0.05, 0.1, 0.5}) {
        double exact_ratio = static_cast<double>(nmin_spibb(p, zeta)) / nmin_spi(p, zeta);
        CHECK(exact_ratio == doctest::Approx(4.0).epsilon(1e-6));
    }
}

TEST_CASE("thresholds: round-trips never overshoot") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        BoundParams p = params(2 + static_cast<std::int64_t>(unit(rng) * 60),
                               1 + static_cast<std::int64_t>(unit(rng) * 5),
                               0.01 + 0.5 * unit(rng), 0.5 + 2.0 * unit(rng),
                               0.5 + 0.45 * unit(rng));
        double zeta = 0.05 + unit(rng);
        CHECK(zeta_spi(p, nmin_spi(p, zeta)) <= zeta);
        CHECK(zeta_spibb(p, nmin_spibb(p, zeta)) <= zeta + 1e-12);
        CHECK(zeta_2s(p, nmin_2s(p, zeta)) <= zeta + 1e-12);
        CHECK(zeta_beta(p, nmin_beta(p, zeta)) <= zeta + 1e-12);

        std::int64_t n = 1 + static_cast<std::int64_t>(unit(rng) * 500);
        CHECK(nmin_spibb(p, zeta_spibb(p, n)) <= n);
        CHECK(nmin_2s(p, zeta_2s(p, n)) <= n);
    }
}

TEST_CASE("thresholds: recovering a sample count from its own loss is exact") {
    BoundParams p = params(25, 4);
    CHECK(nmin_spibb(p, zeta_spibb(p, 100)) == 100);
    p = params(25, 5);
    CHECK(nmin_spibb(p, zeta_spibb(p, 60)) == 60);
}

TEST_CASE("thresholds: all losses decrease in n, all thresholds decrease in zeta") {
    BoundParams p = params(30, 3);
    for (std::int64_t n : {1, 2, 5, 17, 100, 5000}) {
        CHECK(zeta_spi(p, n) > zeta_spi(p, n + 1));
        CHECK(zeta_spibb(p, n) > zeta_spibb(p, n + 1));
        CHECK(zeta_2s(p, n) > zeta_2s(p, n + 1));
    }
    for (double zeta : {0.05, 0.1, 0.2, 0.5}) {
        CHECK(nmin_spi(p, zeta) >= nmin_spi(p, zeta * 1.2));
        CHECK(nmin_spibb(p, zeta) >= nmin_spibb(p, zeta * 1.2));
        CHECK(nmin_2s(p, zeta) >= nmin_2s(p, zeta * 1.2));
        CHECK(nmin_beta(p, zeta) >= nmin_beta(p, zeta * 1.2));
    }
}

TEST_CASE("thresholds: the performance correction shifts the loss additively") {
    BoundParams p = params(25, 4);
    BoundParams shifted = p;
    shifted.rho_tilde = 0.03;
    CHECK(zeta_spibb(shifted, 100) == doctest::Approx(zeta_spibb(p, 100) + 0.03));
    CHECK(nmin_spibb(shifted, 0.2) == nmin_spibb(p, 0.17));
    CHECK_THROWS_AS(nmin_spibb(shifted, 0.02), DomainError);
}

TEST_CASE("interval width: quantile arithmetic at n = 0") {
    // uniform prior, delta_t 0.5: 1 - 2 * I^{-1}_{0.25}(1,1) = 0.5
    CHECK(interval_width(0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("interval width: strictly decreasing over even n, increasing as delta_t shrinks") {
    double prev = 2.0;
    for (std::int64_t n = 0; n <= 200; n += 2) {
        double w = interval_width(n, 0.05);
        CHECK(w < prev);
        prev = w;
    }
    CHECK(interval_width(50, 1e-6) > interval_width(50, 1e-3));
    CHECK(interval_width(50, 1e-12) > interval_width(50, 1e-6));
}

TEST_CASE("interval width: informative priors tighten the interval") {
    BetaPrior informative{10.0, 10.0};
    CHECK(interval_width(20, 0.05, informative) < interval_width(20, 0.05));
    // prior counts and observations are interchangeable in the width
    CHECK(interval_width(20, 0.05, informative) ==
          doctest::Approx(interval_width(38, 0.05)).epsilon(1e-12));
}

TEST_CASE("interval width: domain errors") {
    CHECK_THROWS_AS(interval_width(-1, 0.05), DomainError);
    CHECK_THROWS_AS(interval_width(10, 0.0), DomainError);
    CHECK_THROWS_AS(interval_width(10, 1.0), DomainError);
    CHECK_THROWS_AS(interval_width(10, 0.05, BetaPrior{0.0, 1.0}), DomainError);
}

TEST_CASE("k-successor thresholds: two is optimal and equals the dedicated bound") {
    BoundParams p = params(25, 4);
    CHECK(nmin_ksucc(p, 0.1, 2) == nmin_2s(p, 0.1));

    std::int64_t best = nmin_ksucc(p, 0.1, 2);
    for (int k = 2; k <= 20; ++k) CHECK(nmin_ksucc(p, 0.1, k) >= best);
    CHECK(nmin_ksucc(p, 0.1, 3) == best); // 2^k/(k-1) ties at k in {2,3}
    for (int k = 4; k < 20; ++k)
        CHECK(nmin_ksucc(p, 0.1, k + 1) > nmin_ksucc(p, 0.1, k));
    CHECK_THROWS_AS(nmin_ksucc(p, 0.1, 1), DomainError);
}

TEST_CASE("ordering: beta is never above two-successor; branching condition is sharp") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        BoundParams p = params(2 + static_cast<std::int64_t>(unit(rng) * 40),
                               1 + static_cast<std::int64_t>(unit(rng) * 6),
                               0.02 + 0.4 * unit(rng));
        double zeta = 0.05 + 0.5 * unit(rng);
        std::int64_t n2s = nmin_2s(p, zeta);
        CHECK(nmin_beta(p, zeta) <= n2s);

        double lhs = static_cast<double>(p.n_states) * 0.6931471805599453;
        double rhs = std::log(4.0 * static_cast<double>(p.n_states) *
                              static_cast<double>(p.n_actions));
        std::int64_t nspibb = nmin_spibb(p, zeta);
        if (lhs >= rhs + 1e-9) CHECK(n2s <= nspibb);
        if (lhs <= rhs - 1e-9) CHECK(n2s >= nspibb);
    }
}

TEST_CASE("conversion: matched-loss thresholds for the three benchmark shapes") {
    struct Case {
        std::int64_t s, a, n_spibb, expect_2s, expect_beta;
    };
    const Case cases[] = {
        {25, 4, 100, 55, 27},   {25, 4, 200, 110, 67},   {25, 4, 400, 219, 146},
        {25, 5, 60, 34, 10},    {25, 5, 120, 67, 36},    {25, 5, 180, 101, 61},
        {376, 4, 600, 43, 12},  {376, 4, 800, 57, 25},   {376, 4, 1000, 71, 37},
    };
    for (const Case& c : cases) {
        BoundParams p = params(c.s, c.a);
        CHECK(convert_nmin(p, c.n_spibb, BoundKind::TwoSuccessor) == c.expect_2s);
        CHECK(convert_nmin(p, c.n_spibb, BoundKind::Beta) == c.expect_beta);
    }
}

TEST_CASE("conversion: result never exceeds the source threshold (log-argument gap)") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        BoundParams p = params(25 + static_cast<std::int64_t>(unit(rng) * 400),
                               2 + static_cast<std::int64_t>(unit(rng) * 4));
        std::int64_t n = 20 + static_cast<std::int64_t>(unit(rng) * 2000);
        std::int64_t n2s = convert_nmin(p, n, BoundKind::TwoSuccessor);
        std::int64_t nbeta = convert_nmin(p, n, BoundKind::Beta);
        CHECK(nbeta <= n2s);
        if (std::pow(2.0, static_cast<double>(p.n_states)) >=
            4.0 * static_cast<double>(p.n_states * p.n_actions))
            CHECK(n2s <= n);
    }
}

TEST_CASE("state sweep: covers the requested grid") {
    std::vector<SweepRow> rows = sweep_states(params(1, 4), 0.1, 10, 100, 30);
    REQUIRE(rows.size() == 4);
    CHECK(rows.front().states == 10);
    CHECK(rows.back().states == 100);
    for (const SweepRow& r : rows) {
        CHECK(r.n_beta <= r.n_2s);
        CHECK(r.n_spi * 4 - r.n_spibb <= 4); // same log term, constant 8 vs 32
    }
    CHECK_THROWS_AS(sweep_states(params(1, 4), 0.1, 0, 10, 1), DomainError);
}

TEST_CASE("bound params: validation") {
    CHECK_THROWS_AS(params(0, 4).validate(), DomainError);
    CHECK_THROWS_AS(params(5, 4, 1.5).validate(), DomainError);
    CHECK_THROWS_AS(params(5, 4, 0.1, -1.0).validate(), DomainError);
    BoundParams bad_gamma = params(5, 4);
    bad_gamma.gamma = 1.0;
    CHECK_THROWS_AS(bad_gamma.validate(), DomainError);
}
