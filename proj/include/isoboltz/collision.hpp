#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "random.hpp"
#include "spectral.hpp"
#include "spline.hpp"

namespace isoboltz {

// K_f(v, w) = A(v) |w|^{-d-2s} with A = c_dgs [f * |.|^{gamma+2s}].
struct KernelView {
    ModelParams params;
    Field A;

    double operator()(std::size_t v, const Point& w) const {
        double r2 = 0.0;
        for (int k = 0; k < params.d; ++k) r2 += w[k] * w[k];
        return A[v] * std::pow(r2, -0.5 * (params.d + 2.0 * params.s));
    }

    // Largest c0 with A(v) >= c0 <v>^{gamma+2s} on the inner half-box.
    double lower_bound_c0() const {
        const Grid& g = A.grid;
        double c0 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < A.size(); ++i) {
            Point v = g.node(i);
            bool inner = true;
            for (int k = 0; k < g.d; ++k)
                if (std::abs(v[k] - g.center[k]) > 0.5 * g.L) inner = false;
            if (!inner) continue;
            c0 = std::min(c0, A[i] / std::pow(japanese(v, g.d), params.gamma + 2.0 * params.s));
        }
        return c0;
    }
};

inline void require_very_soft(const ModelParams& p) {
    if (!p.very_soft()) throw DomainError("collision operator requires gamma + 2s < 0");
}

inline KernelView kernel_view(SpectralPlan& plan, const Field& f) {
    const auto& p = plan.params();
    require_very_soft(p);
    auto c = compute_constants(p);
    KernelView kv{p, plan.power_convolve(f, p.gamma + 2.0 * p.s)};
    for (double& a : kv.A.values) a *= c.c_dgs;
    return kv;
}

struct CollisionParts {
    Field diffusion;
    Field reaction;
};

namespace detail {

// c (A Dg - g DA) on the padded box, A = f * |.|^mu and D the multiplier
// `mult`. Using D A in place of a second convolution keeps the discrete
// operator antisymmetric, so mass is conserved exactly.
inline void divergence_pair(SpectralPlan& plan, const Field& f, const Field& g, double mu,
                            const std::vector<double>& mult, double c, std::vector<double>& diff,
                            std::vector<double>& react) {
    plan.check_grid(f);
    plan.check_grid(g);
    const auto& K = plan.kernel_spectrum(mu);
    std::vector<double> ef, eg, A, DA;
    std::vector<cplx> F, G, tmp;
    plan.embed(f, ef, true);
    plan.forward(ef, F);
    const bool same = &f == &g;
    if (same) {
        eg = ef;
        G = F;
    } else {
        plan.embed(g, eg, true);
        plan.forward(eg, G);
    }
    tmp.resize(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) tmp[i] = F[i] * K[i];
    plan.inverse(tmp, A);
    for (std::size_t i = 0; i < F.size(); ++i) tmp[i] = F[i] * (K[i] * mult[i]);
    plan.inverse(tmp, DA);
    for (std::size_t i = 0; i < G.size(); ++i) tmp[i] = G[i] * mult[i];
    std::vector<double> Dg;
    plan.inverse(tmp, Dg);
    diff.resize(A.size());
    react.resize(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        diff[i] = c * A[i] * Dg[i];
        react[i] = -c * eg[i] * DA[i];
    }
}

}  // namespace detail

inline CollisionParts q_carleman_parts(SpectralPlan& plan, const Field& f, const Field& g) {
    const auto& p = plan.params();
    require_very_soft(p);
    double c = compute_constants(p).c_dgs;
    std::vector<double> diff, react;
    detail::divergence_pair(plan, f, g, p.gamma + 2.0 * p.s, plan.multiplier(), c, diff, react);
    CollisionParts out;
    plan.fold(diff, out.diffusion);
    plan.fold(react, out.reaction);
    return out;
}

inline Field q_carleman(SpectralPlan& plan, const Field& f, const Field& g) {
    const auto& p = plan.params();
    require_very_soft(p);
    double c = compute_constants(p).c_dgs;
    std::vector<double> diff, react;
    detail::divergence_pair(plan, f, g, p.gamma + 2.0 * p.s, plan.multiplier(), c, diff, react);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] += react[i];
    Field out;
    plan.fold(diff, out);
    return out;
}

inline Field q_landau_iso(SpectralPlan& plan, const Field& f, const Field& g) {
    const auto& p = plan.params();
    if (std::abs(p.gamma + 2.0) < pole_tolerance) throw PoleError("q_landau_iso: a_landau has a pole at gamma = -2");
    if (!(p.gamma < -2.0)) throw DomainError("q_landau_iso: requires gamma < -2");
    double a = *compute_constants(p).a_landau;
    std::vector<double> diff, react;
    detail::divergence_pair(plan, f, g, p.gamma + 2.0, plan.laplacian(), a, diff, react);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] += react[i];
    Field out;
    plan.fold(diff, out);
    return out;
}

// Returns q - w (l_0 + l . v) with l chosen so that the grid integrals of q
// and v q vanish; v follows the seam convention of the momentum diagnostic.
// A singular moment matrix (too few weighted nodes) leaves q unchanged.
inline Field conserve_moments(const Field& q, const Field& w) {
    require_same_grid(q, w, "conserve_moments");
    const Grid& g = q.grid;
    const int m = g.d + 1;
    std::vector<double> M(m * m, 0.0), r(m, 0.0), phi(m);
    auto basis = [&](std::size_t i) {
        auto ix = g.index(i);
        Point x = g.node(i);
        phi[0] = 1.0;
        for (int k = 0; k < g.d; ++k) phi[k + 1] = ix[k] == 0 ? g.center[k] : x[k];
    };
    for (std::size_t i = 0; i < q.size(); ++i) {
        basis(i);
        const double wi = std::abs(w[i]);
        for (int a = 0; a < m; ++a) {
            r[a] += phi[a] * q[i];
            for (int b = 0; b < m; ++b) M[a * m + b] += wi * phi[a] * phi[b];
        }
    }
    double diag = 0.0;
    for (int a = 0; a < m; ++a) diag = std::max(diag, M[a * m + a]);
    if (!(diag > 0.0)) return q;
    // Gaussian elimination with partial pivoting
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int a = c + 1; a < m; ++a)
            if (std::abs(M[a * m + c]) > std::abs(M[piv * m + c])) piv = a;
        if (!(std::abs(M[piv * m + c]) > 1e-12 * diag)) return q;
        if (piv != c) {
            for (int b = 0; b < m; ++b) std::swap(M[c * m + b], M[piv * m + b]);
            std::swap(r[c], r[piv]);
        }
        for (int a = c + 1; a < m; ++a) {
            double x = M[a * m + c] / M[c * m + c];
            for (int b = c; b < m; ++b) M[a * m + b] -= x * M[c * m + b];
            r[a] -= x * r[c];
        }
    }
    std::vector<double> lam(m);
    for (int a = m - 1; a >= 0; --a) {
        double x = r[a];
        for (int b = a + 1; b < m; ++b) x -= M[a * m + b] * lam[b];
        lam[a] = x / M[a * m + a];
    }
    Field out = q;
    for (std::size_t i = 0; i < q.size(); ++i) {
        basis(i);
        double corr = 0.0;
        for (int a = 0; a < m; ++a) corr += lam[a] * phi[a];
        out[i] -= std::abs(w[i]) * corr;
    }
    return out;
}

struct QuadratureConfig {
    long samples = 1000000;
    std::uint64_t seed = 0;
    double W = 0.0;              // singular-region radius; <= 0 means the box width 2L
    double core_fraction = 0.95;  // probability of drawing |w| <= W
    double r_min = 1e-4;          // below this the symmetric difference is rescaled
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

// Draws w with density p(w) ~ |w|^{2-d-2s} on |w| <= W and a Pareto tail
// beyond, returning p(w).
class JumpSampler {
public:
    JumpSampler(int d, double s, double W, double core)
        : d_(d), s_(s), W_(W), core_(core) {
        double area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / isoboltz::gamma(0.5 * d);
        core_norm_ = core * (2.0 - 2.0 * s) / (area * std::pow(W, 2.0 - 2.0 * s));
        tail_norm_ = (1.0 - core) * 2.0 * s * std::pow(W, 2.0 * s) / area;
    }

    double sample(Rng& rng, Point& w, double& r) const {
        double u = rng.uniform_pos();
        bool in_core = rng.uniform() < core_;
        r = in_core ? W_ * std::pow(u, 1.0 / (2.0 - 2.0 * s_)) : W_ * std::pow(u, -1.0 / (2.0 * s_));
        if (d_ == 1) {
            w = {rng.uniform() < 0.5 ? -r : r, 0.0, 0.0};
        } else {
            Point z{0.0, 0.0, 0.0};
            double n2 = 0.0;
            while (!(n2 > 1e-300)) {
                n2 = 0.0;
                for (int k = 0; k < d_; ++k) {
                    z[k] = rng.normal();
                    n2 += z[k] * z[k];
                }
            }
            double inv = r / std::sqrt(n2);
            for (int k = 0; k < 3; ++k) w[k] = z[k] * inv;
        }
        return r <= W_ ? core_norm_ * std::pow(r, 2.0 - d_ - 2.0 * s_)
                       : tail_norm_ * std::pow(r, -d_ - 2.0 * s_);
    }

private:
    int d_;
    double s_, W_, core_, core_norm_, tail_norm_;
};

struct Welford {
    long n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        double dx = x - mean;
        mean += dx / n;
        m2 += dx * (x - mean);
    }
    MCEstimate result() const {
        if (n < 2) return {mean, 0.0};
        return {mean, std::sqrt(m2 / (n - 1) / n)};
    }
};

inline double norm(const Point& x, int d) {
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) r2 += x[k] * x[k];
    return std::sqrt(r2);
}

inline void check_quadrature(const QuadratureConfig& cfg) {
    if (cfg.samples < 1000) throw ConfigError("quadrature needs at least 1000 samples");
    if (!(cfg.W > 0.0)) throw ConfigError("quadrature radius W must be positive");
    if (!(cfg.core_fraction > 0.0 && cfg.core_fraction < 1.0))
        throw ConfigError("core_fraction must lie in (0, 1)");
    if (!(cfg.r_min >= 0.0)) throw ConfigError("r_min must be non-negative");
}

}  // namespace detail

// Monte-Carlo estimate of the integral form
//   c int int |v - v* + w|^{gamma+2s} |w|^{-d-2s} [g(v+w) f(v*-w) - g(v) f(v*)] dw dv*
// written with v* -> v* + w in the gain term, so f enters only at the sampled
// point: c int f(u) int |w|^{-d-2s} [|v-u|^mu g(v+w) - |v-u+w|^mu g(v)] dw du.
// +-w are paired antithetically; u is drawn from `vstar`. f and g are callables
// Point -> double.
template <class FFn, class GFn>
MCEstimate q_direct_point(const ModelParams& params, FFn&& f, GFn&& g, const CellSampler& vstar,
                          const Point& v, const QuadratureConfig& cfg) {
    detail::check_quadrature(cfg);
    require_very_soft(params);
    if (vstar.empty()) return {0.0, 0.0};
    const int d = params.d;
    const double mu = params.gamma + 2.0 * params.s;
    const double c = compute_constants(params).c_dgs;
    detail::JumpSampler jumps(d, params.s, cfg.W, cfg.core_fraction);
    Rng rng(cfg.seed);
    detail::Welford acc;
    const double gv = g(v);
    for (long it = 0; it < cfg.samples; ++it) {
        Point u;
        double pu = vstar.sample(rng, u);
        Point w;
        double r;
        double pw = jumps.sample(rng, w, r);
        double re = std::max(r, cfg.r_min);
        double scale = re > r ? (r / re) * (r / re) : 1.0;
        if (re > r)
            for (int k = 0; k < d; ++k) w[k] *= re / r;
        Point diff{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) diff[k] = v[k] - u[k];
        const double base = std::pow(detail::norm(diff, d), mu);
        double F = 0.0;
        for (int sign : {1, -1}) {
            Point a{0.0, 0.0, 0.0}, rel{0.0, 0.0, 0.0};
            for (int k = 0; k < d; ++k) {
                double wk = sign * w[k];
                a[k] = v[k] + wk;
                rel[k] = diff[k] + wk;
            }
            F += base * g(a) - std::pow(detail::norm(rel, d), mu) * gv;
        }
        double x = c * 0.5 * F * f(u) * scale * std::pow(r, -d - 2.0 * params.s) / (pw * pu);
        acc.add(x);
    }
    return acc.result();
}

inline MCEstimate q_direct_point(const ModelParams& params, const Field& f, const Field& g, const Point& v,
                                 QuadratureConfig cfg) {
    require_same_grid(f, g, "q_direct_point");
    if (cfg.W <= 0.0) cfg.W = 2.0 * f.grid.L;
    SplineField fs(f), gs(g);
    CellSampler sampler(f);
    return q_direct_point(
        params, [&](const Point& x) { return fs(x); }, [&](const Point& x) { return gs(x); }, sampler, v,
        cfg);
}

}  // namespace isoboltz
