#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace isoboltz {

inline constexpr double pole_tolerance = 1e-9;

namespace detail {

inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double xm1) {
    double a = lanczos_coef[0];
    for (int i = 1; i < 9; ++i) a += lanczos_coef[i] / (xm1 + i);
    return a;
}

// sin(pi x) with exact zeros at the integers
inline double sinpi(double x) {
    double r = x - 2.0 * std::round(0.5 * x);
    if (r > 0.5) r = 1.0 - r;
    if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

inline void check_pole(double x) {
    if (x <= 0.5 && std::abs(x - std::round(x)) < pole_tolerance && std::round(x) <= 0.0)
        throw PoleError("Gamma pole at argument " + std::to_string(x));
}

}  // namespace detail

struct SignedLog {
    double log_abs;
    int sign;
};

// log|Gamma(x)| together with the sign of Gamma(x).
inline SignedLog log_gamma(double x) {
    if (!std::isfinite(x)) throw DomainError("log_gamma: non-finite argument");
    detail::check_pole(x);
    if (x < 0.5) {
        double sp = detail::sinpi(x);
        SignedLog r = log_gamma(1.0 - x);
        return {std::log(std::numbers::pi) - std::log(std::abs(sp)) - r.log_abs,
                (sp < 0 ? -1 : 1) * r.sign};
    }
    double xm1 = x - 1.0;
    double t = xm1 + detail::lanczos_g + 0.5;
    double v = 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
               std::log(detail::lanczos_sum(xm1));
    return {v, 1};
}

inline double gamma(double x) {
    if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
    detail::check_pole(x);
    if (x < 0.5) return std::numbers::pi / (detail::sinpi(x) * gamma(1.0 - x));
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    double xm1 = x - 1.0;
    double t = xm1 + detail::lanczos_g + 0.5;
    // split the power so t^(x-1/2) does not overflow before the exponential
    double p = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * detail::lanczos_sum(xm1);
}

inline double digamma(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double z = 1.0 / (x * x);
    // Bernoulli terms B_2k / (2k)
    constexpr std::array<double, 8> b = {1.0 / 12,         -1.0 / 120,       1.0 / 252,
                                         -1.0 / 240,       1.0 / 132,        -691.0 / 32760,
                                         1.0 / 12,         -3617.0 / 8160};
    double s = 0.0;
    for (int k = 7; k >= 0; --k) s = (s + b[k]) * z;
    return acc + std::log(x) - 0.5 / x - s;
}

// Hurwitz zeta sum_{k>=0} (k + a)^{-p} for p > 1, a > 0 (Euler-Maclaurin).
inline double hurwitz_zeta(double p, double a) {
    if (!(p > 1.0) || !(a > 0.0)) throw DomainError("hurwitz_zeta: need p > 1, a > 0");
    constexpr int m = 12;
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += std::pow(k + a, -p);
    double x = a + m;
    s += std::pow(x, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(x, -p);
    // B_2j/(2j)! * p(p+1)...(p+2j-2) x^{-p-2j+1}
    constexpr std::array<double, 6> b = {1.0 / 6,   -1.0 / 30, 1.0 / 42,
                                         -1.0 / 30, 5.0 / 66,  -691.0 / 2730};
    double fact = 1.0;
    double poch = p;
    double xp = std::pow(x, -p - 1.0);
    for (int j = 1; j <= 6; ++j) {
        fact *= (2.0 * j - 1.0) * (2.0 * j);
        s += b[j - 1] / fact * poch * xp;
        poch *= (p + 2.0 * j - 1.0) * (p + 2.0 * j);
        xp /= x * x;
    }
    return s;
}

}  // namespace isoboltz
