#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "collision.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "random.hpp"
#include "spectral.hpp"
#include "spline.hpp"

namespace isoboltz {

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool passed = false;
    double tolerance = 0.0;
    std::string method;
    long samples = 0;
};

inline constexpr double double_sum_guard = 2e8;

namespace detail {

// sum_v A(v) sum_{w != 0} |u(v+w) - u(v)|^2 |w|^{-d-2s} h^{2d}, with w over the
// padded-box offsets. With zero_exterior u = 0 outside the box, otherwise pairs
// leaving the box are dropped.
inline double jump_seminorm(const Field& u, const Field& A, double s, bool zero_exterior) {
    const Grid& g = u.grid;
    const int d = g.d, n = g.n, N = 2 * n;
    if (static_cast<double>(g.size()) * std::pow(static_cast<double>(N), d) > double_sum_guard)
        throw CostError("double sum over grid and padded offsets exceeds the cost guard");
    const double h = g.h();
    std::size_t offsets = 1;
    for (int k = 0; k < d; ++k) offsets *= N;
    std::vector<double> kern(offsets);
    std::vector<std::array<int, 3>> shift(offsets);
    for (std::size_t o = 0; o < offsets; ++o) {
        std::array<int, 3> ix{0, 0, 0};
        std::size_t r = o;
        double r2 = 0.0;
        for (int k = d - 1; k >= 0; --k) {
            ix[k] = static_cast<int>(r % N) - n;
            r /= N;
            r2 += (ix[k] * h) * (ix[k] * h);
        }
        shift[o] = ix;
        kern[o] = r2 == 0.0 ? 0.0 : std::pow(r2, -0.5 * (d + 2.0 * s));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (A[i] == 0.0) continue;
        auto ix = g.index(i);
        const double ui = u[i];
        double inner = 0.0;
        for (std::size_t o = 0; o < offsets; ++o) {
            std::array<int, 3> jx{0, 0, 0};
            bool inside = true;
            for (int k = 0; k < d; ++k) {
                jx[k] = ix[k] + shift[o][k];
                if (jx[k] < 0 || jx[k] >= n) inside = false;
            }
            if (!inside && !zero_exterior) continue;
            double uj = inside ? u[g.flat(jx)] : 0.0;
            double diff = uj - ui;
            inner += diff * diff * kern[o];
        }
        total += A[i] * inner;
    }
    return total * g.cell() * g.cell();
}

}  // namespace detail

// C_H int u^2 [f*|.|^gamma] <= int int |u(v+w)-u(v)|^2 |w|^{-d-2s} [f*|.|^{gamma+2s}]
inline InequalityReport hardy_gap(SpectralPlan& plan, const Field& u, const Field& f) {
    const auto& p = plan.params();
    require_very_soft(p);
    plan.check_grid(u);
    plan.check_grid(f);
    auto c = compute_constants(p);
    if (!(c.CH > 0.0)) throw DomainError("hardy_gap: C_H is not positive for these parameters");
    Field B = plan.power_convolve(f, p.gamma);
    Field A = plan.power_convolve(f, p.gamma + 2.0 * p.s);
    InequalityReport r;
    double lhs = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) lhs += u[i] * u[i] * B[i];
    r.lhs = c.CH * lhs * u.grid.cell();
    r.rhs = detail::jump_seminorm(u, A, p.s, true);
    r.slack = r.rhs - r.lhs;
    r.tolerance = 1e-3 * std::abs(r.rhs);
    r.passed = r.slack >= -r.tolerance;
    r.method = "grid double sum";
    return r;
}

// N^f_{s,gamma}(h)^2 over pairs inside the box
inline double coercivity_form(SpectralPlan& plan, const Field& f, const Field& h) {
    const auto& p = plan.params();
    require_very_soft(p);
    plan.check_grid(f);
    plan.check_grid(h);
    Field A = plan.power_convolve(f, p.gamma + 2.0 * p.s);
    return compute_constants(p).c_dgs * detail::jump_seminorm(h, A, p.s, false);
}

struct TestFunction {
    enum Kind { one, velocity, energy, log_f, custom };
    Kind kind = one;
    int component = 0;
    std::function<double(const Point&)> fn;

    static TestFunction constant() { return {one, 0, {}}; }
    static TestFunction v(int k) { return {velocity, k, {}}; }
    static TestFunction v_squared() { return {energy, 0, {}}; }
    static TestFunction log_density() { return {log_f, 0, {}}; }
    static TestFunction from(std::function<double(const Point&)> f) { return {custom, 0, std::move(f)}; }
};

// (1/2) int int int B f f_* [phi(v+w) + phi(v_*-w) - phi(v) - phi(v_*)],
// B = c |v - v_* + w|^{gamma+2s} |w|^{-d-2s}.
inline MCEstimate weak_functional(const ModelParams& params, const Field& f, const TestFunction& phi,
                                  QuadratureConfig cfg) {
    require_very_soft(params);
    if (cfg.W <= 0.0) cfg.W = 2.0 * f.grid.L;
    detail::check_quadrature(cfg);
    if (phi.kind == TestFunction::log_f)
        for (double x : f.values)
            if (!(x > 0.0)) throw DomainError("weak_functional: log f needs a strictly positive field");
    CellSampler sampler(f);
    if (sampler.empty()) return {0.0, 0.0};
    SplineField fs(f);
    const int d = params.d;
    const double mu = params.gamma + 2.0 * params.s;
    const double c = compute_constants(params).c_dgs;
    const double log_floor = std::log(std::numeric_limits<double>::min());
    auto eval_phi = [&](const Point& x) -> double {
        switch (phi.kind) {
            case TestFunction::one: return 1.0;
            case TestFunction::velocity: return x[phi.component];
            case TestFunction::energy: {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) r2 += x[k] * x[k];
                return r2;
            }
            case TestFunction::log_f: {
                double v = fs(x);
                return v > std::numeric_limits<double>::min() ? std::log(v) : log_floor;
            }
            case TestFunction::custom: return phi.fn(x);
        }
        return 0.0;
    };
    detail::JumpSampler jumps(d, params.s, cfg.W, cfg.core_fraction);
    Rng rng(cfg.seed);
    detail::Welford acc;
    for (long it = 0; it < cfg.samples; ++it) {
        Point v, vs, w;
        double pv = sampler.sample(rng, v);
        double pvs = sampler.sample(rng, vs);
        double r;
        double pw = jumps.sample(rng, w, r);
        double re = std::max(r, cfg.r_min);
        double scale = re > r ? (r / re) * (r / re) : 1.0;
        if (re > r)
            for (int k = 0; k < d; ++k) w[k] *= re / r;
        const double weight = fs(v) * fs(vs);
        const double base = eval_phi(v) + eval_phi(vs);
        double F = 0.0;
        for (int sign : {1, -1}) {
            Point a{0.0, 0.0, 0.0}, b{0.0, 0.0, 0.0}, rel{0.0, 0.0, 0.0};
            for (int k = 0; k < d; ++k) {
                double wk = sign * w[k];
                a[k] = v[k] + wk;
                b[k] = vs[k] - wk;
                rel[k] = v[k] - vs[k] + wk;
            }
            F += std::pow(detail::norm(rel, d), mu) * (eval_phi(a) + eval_phi(b) - base);
        }
        acc.add(0.5 * c * 0.5 * F * weight * scale * std::pow(r, -d - 2.0 * params.s) / (pw * pv * pvs));
    }
    return acc.result();
}

namespace detail {

// Mean of |r e + rho omega|^mu over the unit sphere.
inline double spherical_mean_power(int d, double mu, double r, double rho) {
    if (d == 1) return 0.5 * (std::pow(r + rho, mu) + std::pow(std::abs(r - rho), mu));
    if (d == 3) {
        if (std::abs(mu + 2.0) < 1e-12)
            return (std::log(r + rho) - std::log(std::abs(r - rho))) / (2.0 * r * rho);
        return (std::pow(r + rho, mu + 2.0) - std::pow(std::abs(r - rho), mu + 2.0)) /
               (2.0 * (mu + 2.0) * r * rho);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    // phi = pi - theta, |r e + rho omega|^2 = (r - rho)^2 + 4 r rho sin^2(phi/2)
    auto integrand = [&](double phi) {
        double sh = std::sin(0.5 * phi);
        double q = (r - rho) * (r - rho) + 4.0 * r * rho * sh * sh;
        if (!(q > 0.0)) return 0.0;
        return std::pow(q, 0.5 * mu) * std::pow(std::sin(phi), d - 2);
    };
    double norm = std::sqrt(std::numbers::pi) * isoboltz::gamma(0.5 * (d - 1)) / isoboltz::gamma(0.5 * d);
    return ts.integrate(integrand, 0.0, std::numbers::pi) / norm;
}

}  // namespace detail

// Relative residual of int (|v|^mu - |v+w|^mu) |w|^{-d-2s} dw = c_R |v|^gamma,
// mu = gamma + 2s, at each radius.
inline std::vector<double> riesz_residual(const ModelParams& params, const std::vector<double>& radii) {
    require_very_soft(params);
    const int d = params.d;
    const double s = params.s, mu = params.gamma + 2.0 * s;
    const double cR = compute_constants(params).cR;
    const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / isoboltz::gamma(0.5 * d);
    const double lap = mu * (mu + d - 2.0);
    const double bilap = lap * (mu - 2.0) * (mu + d - 4.0);
    std::vector<double> out;
    for (double r : radii) {
        if (!(r > 0.0)) throw DomainError("riesz_residual: radii must be positive");
        const double rmu = std::pow(r, mu);
        auto integrand = [&](double rho) {
            return std::pow(rho, -1.0 - 2.0 * s) * (rmu - detail::spherical_mean_power(d, mu, r, rho));
        };
        // r^mu - M(rho) = -rho^2/(2d) Lap u - rho^4/(8d(d+2)) Lap^2 u + O(rho^6)
        const double rho0 = 1e-3 * r;
        const double a2 = -lap * std::pow(r, mu - 2.0) / (2.0 * d);
        const double a4 = -bilap * std::pow(r, mu - 4.0) / (8.0 * d * (d + 2.0));
        double near = a2 * std::pow(rho0, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) +
                      a4 * std::pow(rho0, 4.0 - 2.0 * s) / (4.0 - 2.0 * s);
        boost::math::quadrature::tanh_sinh<double> ts;
        boost::math::quadrature::exp_sinh<double> es;
        double total = near, l1 = std::abs(near), errsum = 0.0;
        auto add = [&](double value, double err, double mag) {
            total += value;
            l1 += mag;
            errsum += err;
        };
        double err = 0.0, mag = 0.0, v = 0.0;
        v = ts.integrate(integrand, rho0, r, 1e-12, &err, &mag);
        add(v, err, mag);
        v = ts.integrate(integrand, r, 2.0 * r, 1e-12, &err, &mag);
        add(v, err, mag);
        v = es.integrate([&](double t) { return integrand(2.0 * r + t); }, 1e-12, &err, &mag);
        add(v, err, mag);
        if (!(errsum <= 1e-7 * l1)) throw ConvergenceError("riesz_residual: quadrature did not converge");
        double target = cR * std::pow(r, params.gamma);
        out.push_back(std::abs(area * total - target) / std::abs(target));
    }
    return out;
}

}  // namespace isoboltz
