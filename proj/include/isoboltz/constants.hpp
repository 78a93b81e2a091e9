#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace isoboltz {

struct ModelParams {
    int d = 3;
    double gamma = -2.1;
    double s = 0.85;

    void validate() const {
        if (d < 1) throw DomainError("ModelParams: d must be a positive integer");
        if (!(gamma > -d && gamma < 0.0))
            throw DomainError("ModelParams: gamma must lie in (-d, 0)");
        if (!(s > 0.0 && s < 1.0)) throw DomainError("ModelParams: s must lie in (0, 1)");
    }
    bool very_soft() const { return gamma + 2.0 * s < 0.0; }
    double threshold() const { return -(d + 4.0 * s) / 3.0; }
    bool main_theorem_range() const {
        double lo = std::max(threshold(), -2.0 * s - 4.0 * s / d);
        return d >= 3 && gamma >= lo && gamma < -2.0;
    }
};

struct ConstantSet {
    double c_dgs = 0, c1 = 0, c2 = 0, cR = 0, CH = 0;
    std::optional<double> a_landau, c_landau;
    double ratio = 0;
    double frac_norm = 0;
};

namespace detail {

// Running product of Gamma values and plain factors, kept as log|.| and sign.
class GammaProduct {
public:
    explicit GammaProduct(const char* what) : what_(what) {}

    GammaProduct& mul(double x) { return acc(x, +1, false); }
    GammaProduct& div(double x) { return acc(x, -1, false); }
    GammaProduct& mul_abs(double x) { return acc(x, +1, true); }
    GammaProduct& div_abs(double x) { return acc(x, -1, true); }
    GammaProduct& scale(double v) {
        if (v == 0.0) zero_ = true;
        else {
            log_ += std::log(std::abs(v));
            if (v < 0) sign_ = -sign_;
        }
        return *this;
    }
    GammaProduct& scale_log(double lv) {
        log_ += lv;
        return *this;
    }
    double value() const { return zero_ ? 0.0 : sign_ * std::exp(log_); }

private:
    GammaProduct& acc(double x, int power, bool absolute) {
        SignedLog g{};
        try {
            g = log_gamma(x);
        } catch (const PoleError&) {
            throw PoleError(std::string(what_) + ": Gamma pole at argument " + std::to_string(x));
        }
        log_ += power * g.log_abs;
        if (!absolute && g.sign < 0) sign_ = -sign_;
        return *this;
    }

    const char* what_;
    double log_ = 0.0;
    int sign_ = 1;
    bool zero_ = false;
};

}  // namespace detail

inline double frac_norm(int d, double s) {
    return detail::GammaProduct("frac_norm")
        .scale_log(s * std::log(4.0) - 0.5 * d * std::log(std::numbers::pi))
        .mul(0.5 * (d + 2 * s))
        .div_abs(-s)
        .value();
}

inline ConstantSet compute_constants(const ModelParams& p) {
    p.validate();
    const double d = p.d, g = p.gamma, s = p.s;
    const double lpi = std::log(std::numbers::pi), l2 = std::log(2.0);
    if (std::abs(g + 2 * s) < pole_tolerance)
        throw PoleError("compute_constants: gamma = -2s is a pole of Gamma(-(gamma+2s)/2)");
    ConstantSet c;

    c.c_dgs = detail::GammaProduct("c_dgs")
                  .scale(1 - s)
                  .mul((d + 2 * s) / 2)
                  .mul(-(g + 2 * s) / 2)
                  .div((d + g + 2 * s) / 2)
                  .scale_log(-d * lpi - (d + g) * l2)
                  .value();

    c.c1 = detail::GammaProduct("c1")
               .scale(1 - s)
               .mul_abs(-s)
               .mul(-(g + 2 * s) / 2)
               .div((d + g + 2 * s) / 2)
               .scale_log(-0.5 * d * lpi - (d + g + 2 * s) * l2)
               .value();

    c.c2 = detail::GammaProduct("c2")
               .scale(1 - s)
               .mul_abs(-s)
               .mul(-g / 2)
               .div((d + g) / 2)
               .scale_log(-0.5 * d * lpi - (d + g) * l2)
               .value();

    c.cR = detail::GammaProduct("cR")
               .scale_log(0.5 * d * lpi)
               .mul_abs(-s)
               .mul((g + 2 * s + d) / 2)
               .mul(-g / 2)
               .div((d + 2 * s) / 2)
               .div((g + d) / 2)
               .div(-(g + 2 * s) / 2)
               .value();

    double pre = detail::GammaProduct("CH")
                     .scale_log(0.5 * d * lpi)
                     .mul_abs(-s)
                     .div((d + 2 * s) / 2)
                     .value();
    double t1 = detail::GammaProduct("CH")
                    .scale(2.0)
                    .mul((d - g) / 4)
                    .mul((d + g + 4 * s) / 4)
                    .div((d + g) / 4)
                    .div((d - g - 4 * s) / 4)
                    .value();
    double t2 = detail::GammaProduct("CH")
                    .mul(-g / 2)
                    .mul((d + g + 2 * s) / 2)
                    .div((d + g) / 2)
                    .div((-g - 2 * s) / 2)
                    .value();
    c.CH = pre * (t1 - t2);

    if (std::abs(g + 2.0) >= pole_tolerance) {
        double a = detail::GammaProduct("a_landau")
                       .scale_log(-0.5 * d * lpi - (d + g + 1) * l2)
                       .scale(1.0 / (-g - 2))
                       .mul(-g / 2)
                       .div((d + g + 2) / 2)
                       .value();
        c.a_landau = a;
        c.c_landau = (-g - 2) * (d + g) * a;
    }
    c.ratio = c.cR / c.CH;
    c.frac_norm = frac_norm(p.d, s);
    return c;
}

inline double phi(const ModelParams& p) {
    p.validate();
    const double d = p.d, g = p.gamma, s = p.s;
    return detail::GammaProduct("phi")
        .mul((d - g) / 4)
        .mul((d + g + 4 * s) / 4)
        .mul((d + g) / 2)
        .mul((-g - 2 * s) / 2)
        .div((d + g) / 4)
        .div((d - g - 4 * s) / 4)
        .div(-g / 2)
        .div((d + g + 2 * s) / 2)
        .value();
}

struct ScanSample {
    double gamma, phi, ratio;
};

struct ThresholdScan {
    std::vector<ScanSample> samples;
    double root;
};

namespace detail {

// Phi with the one-sided limit at gamma = -2s, where Gamma((-gamma-2s)/2) blows up.
inline double phi_or_limit(int d, double s, double g) {
    if (std::abs(g + 2 * s) < pole_tolerance) return std::numeric_limits<double>::infinity();
    return phi(ModelParams{d, g, s});
}

}  // namespace detail

inline ThresholdScan threshold_scan(int d, double s, double gamma_lo, double gamma_hi, int n) {
    if (n < 2) throw DomainError("threshold_scan: need n >= 2");
    if (!(gamma_lo < gamma_hi) || gamma_lo <= -d || gamma_hi > -2 * s + pole_tolerance)
        throw DomainError("threshold_scan: interval must lie in (-d, -2s]");
    ThresholdScan out;
    for (int k = 0; k < n; ++k) {
        double g = k == n - 1 ? gamma_hi : gamma_lo + (gamma_hi - gamma_lo) * k / (n - 1);
        double f = detail::phi_or_limit(d, s, g);
        double r = std::isinf(f) ? 0.0 : 1.0 / (2.0 * f - 1.0);
        out.samples.push_back({g, f, r});
    }
    double a = gamma_lo, b = gamma_hi;
    double fa = detail::phi_or_limit(d, s, a) - 1.0;
    double fb = detail::phi_or_limit(d, s, b) - 1.0;
    if (fa == 0.0) {
        out.root = a;
        return out;
    }
    if (fb == 0.0) {
        out.root = b;
        return out;
    }
    if ((fa < 0) == (fb < 0)) throw NoRootError("threshold_scan: Phi - 1 has no sign change");
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        double fm = detail::phi_or_limit(d, s, m) - 1.0;
        if (fm == 0.0) {
            a = b = m;
            break;
        }
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    out.root = 0.5 * (a + b);
    return out;
}

}  // namespace isoboltz
