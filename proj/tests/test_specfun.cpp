#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <isoboltz/specfun.hpp>

using namespace isoboltz;
using Catch::Matchers::WithinRel;

TEST_CASE("gamma at simple arguments") {
    CHECK_THAT(isoboltz::gamma(0.5), WithinRel(1.7724538509055159, 1e-14));
    CHECK_THAT(isoboltz::gamma(5.0), WithinRel(24.0, 1e-14));
    CHECK_THAT(isoboltz::gamma(-0.5), WithinRel(-3.5449077018110318, 1e-14));
}

TEST_CASE("gamma against high-precision values") {
    // mpmath, 30 digits
    struct Row {
        double x, value, log_abs;
    };
    const Row rows[] = {
        {2.5, 1.329340388179137, 0.28468287047291916},
        {7.3, 1271.4236336639088, 7.1478925230222487},
        {-1.5, 2.3632718012073547, 0.86004701537648101},
        {-2.7, -0.93108278483896397, -0.071407085315645688},
        {-3.2, 0.68905641200597905, -0.3724321361299687},
        {1e-3, 999.42377248459545, 6.9071788853838537},
        {33.3, 7.4875775965226323e+35, 82.603723581654943},
        {170.5, 5.5620924145599996e+305, 704.00442773420467},
    };
    for (const auto& r : rows) {
        CHECK_THAT(isoboltz::gamma(r.x), WithinRel(r.value, r.x > 100.0 ? 1e-12 : 1e-13));
        auto lg = log_gamma(r.x);
        CHECK_THAT(lg.log_abs, WithinRel(r.log_abs, 1e-13));
        CHECK(lg.sign == (r.value < 0 ? -1 : 1));
    }
}

TEST_CASE("gamma matches std::tgamma") {
    for (double x = -9.95; x < 30.0; x += 0.173)
        CHECK_THAT(isoboltz::gamma(x), WithinRel(std::tgamma(x), 1e-12));
}

TEST_CASE("gamma poles") {
    for (double x : {0.0, -1.0, -2.0, -7.0, -3.0 + 5e-10})
        CHECK_THROWS_AS(isoboltz::gamma(x), PoleError);
    CHECK_THROWS_AS(log_gamma(-4.0), PoleError);
    CHECK_NOTHROW(isoboltz::gamma(-3.0 + 1e-6));
}

TEST_CASE("gamma recurrence and reflection") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    int checked = 0;
    while (checked < 1000) {
        double x = u(rng);
        if (std::abs(x - std::round(x)) < 1e-3) continue;
        double lhs = isoboltz::gamma(x + 1.0), rhs = x * isoboltz::gamma(x);
        REQUIRE(std::abs(lhs - rhs) / std::abs(lhs) < 1e-11);
        double refl = isoboltz::gamma(x) * isoboltz::gamma(1.0 - x) * std::sin(std::numbers::pi * x) / std::numbers::pi;
        REQUIRE(std::abs(refl - 1.0) < 1e-11);
        ++checked;
    }
}

TEST_CASE("digamma values") {
    CHECK_THAT(digamma(1.0), WithinRel(-0.5772156649015329, 1e-13));
    CHECK_THAT(digamma(2.0), WithinRel(0.4227843350984671, 1e-13));
    CHECK_THAT(digamma(0.5), WithinRel(-1.9635100260214235, 1e-13));
    CHECK_THAT(digamma(0.1), WithinRel(-10.423754940411076, 1e-13));
    CHECK_THAT(digamma(2.5), WithinRel(0.70315664064524319, 1e-13));
    CHECK_THAT(digamma(7.3), WithinRel(1.9178203356379861, 1e-13));
    CHECK_THAT(digamma(30.0), WithinRel(3.3844381326855249, 1e-13));
    CHECK_THROWS_AS(digamma(0.0), DomainError);
    CHECK_THROWS_AS(digamma(-1.5), DomainError);
}

TEST_CASE("digamma recurrence and concavity") {
    for (double x = 1e-6; x < 50.0; x *= 1.37)
        CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-11 * std::max(1.0, 1.0 / x));
    const double step = 0.01;
    double prev = std::numeric_limits<double>::infinity();
    for (double x = 0.1; x < 20.0; x += 0.1) {
        double slope = (digamma(x + step) - digamma(x)) / step;
        CHECK(slope < prev);
        prev = slope;
    }
}

TEST_CASE("hurwitz zeta against high-precision values") {
    CHECK_THAT(hurwitz_zeta(2.0, 1.0), WithinRel(std::numbers::pi * std::numbers::pi / 6.0, 1e-13));
    CHECK_THAT(hurwitz_zeta(1.3, 0.5), WithinRel(5.74964539954099, 1e-12));
    CHECK_THAT(hurwitz_zeta(2.7, 1.25), WithinRel(0.76227638164708204, 1e-12));
    CHECK_THAT(hurwitz_zeta(1.7, 0.75), WithinRel(2.8192691998115471, 1e-12));
    CHECK_THAT(hurwitz_zeta(4.2, 3.5), WithinRel(0.0087649025317767587, 1e-12));
    CHECK_THAT(hurwitz_zeta(1.1, 2.0), WithinRel(9.584448464950801, 1e-12));
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), DomainError);
}
