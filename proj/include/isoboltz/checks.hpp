#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "collision.hpp"
#include "constants.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "spectral.hpp"

namespace isoboltz {

// lhs = |grid - oracle|, rhs = allowed deviation.
struct NodeReport {
    std::string name;
    Point v{0.0, 0.0, 0.0};
    double grid = 0.0, oracle = 0.0, std_error = 0.0;
    InequalityReport report;
};

namespace detail {

inline void fill_deviation(NodeReport& out, double grid, const MCEstimate& mc, double allowed, long samples,
                           const char* method) {
    out.grid = grid;
    out.oracle = mc.value;
    out.std_error = mc.std_error;
    auto& r = out.report;
    r.lhs = std::abs(grid - mc.value);
    r.rhs = allowed;
    r.slack = r.rhs - r.lhs;
    r.tolerance = 0.0;
    r.passed = r.slack >= 0.0;
    r.method = method;
    r.samples = samples;
}

}  // namespace detail

// Nodes on the first axis through the grid center, about half a unit apart.
inline std::vector<std::size_t> operator_check_nodes(const Grid& g, int count) {
    int step = std::max(1, static_cast<int>(std::lround(0.5 / g.h())));
    std::vector<std::size_t> out;
    for (int k = 0; k < count; ++k) {
        std::array<int, 3> ix{g.n / 2, g.n / 2, g.n / 2};
        ix[0] = g.n / 2 + (k * step) % (g.n / 2);
        out.push_back(g.flat(ix));
    }
    return out;
}

// |grid - mc| <= 3 stderr at each node.
inline std::vector<NodeReport> operator_check(const ModelParams& params, const Field& f, int nodes, long samples,
                                              std::uint64_t seed) {
    SpectralPlan plan(f.grid, params);
    Field q = q_carleman(plan, f, f);
    auto idx = operator_check_nodes(f.grid, nodes);
    SplineField fs(f);
    CellSampler sampler(f);
    std::vector<NodeReport> out(idx.size());
    parallel_for(idx.size(), [&](std::size_t k) {
        QuadratureConfig cfg;
        cfg.samples = samples;
        cfg.seed = seed + k;
        cfg.W = 2.0 * f.grid.L;
        Point v = f.grid.node(idx[k]);
        auto fn = [&](const Point& x) { return fs(x); };
        auto mc = q_direct_point(params, fn, fn, sampler, v, cfg);
        detail::fill_deviation(out[k], q[idx[k]], mc, 3.0 * mc.std_error, samples, "monte carlo integral form");
        out[k].v = v;
        out[k].name = "node_" + std::to_string(k);
    });
    return out;
}

// int phi Q(f, f) for phi in {1, v_1, ..., v_d}: grid sum against the weak-form
// oracle, at 3 stderr plus a round-off allowance of 1e-10 sum |phi Q| h^d.
inline std::vector<NodeReport> weak_moment_check(const ModelParams& params, const Field& f, long samples,
                                                 std::uint64_t seed) {
    SpectralPlan plan(f.grid, params);
    Field q = q_carleman(plan, f, f);
    const Grid& g = f.grid;
    std::vector<TestFunction> phis{TestFunction::constant()};
    for (int k = 0; k < g.d; ++k) phis.push_back(TestFunction::v(k));
    std::vector<NodeReport> out(phis.size());
    parallel_for(phis.size(), [&](std::size_t j) {
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            double w = 1.0;
            if (phis[j].kind == TestFunction::velocity) {
                auto ix = g.index(i);
                int k = phis[j].component;
                w = ix[k] == 0 ? g.center[k] : g.node(i)[k];
            }
            sum += w * q[i];
            abs_sum += std::abs(w * q[i]);
        }
        QuadratureConfig cfg;
        cfg.samples = samples;
        cfg.seed = seed + j;
        auto mc = weak_functional(params, f, phis[j], cfg);
        detail::fill_deviation(out[j], sum * g.cell(), mc, 3.0 * mc.std_error + 1e-10 * abs_sum * g.cell(), samples,
                               "monte carlo weak form");
        out[j].name = j == 0 ? "phi_1" : "phi_v" + std::to_string(j);
    });
    return out;
}

struct HardyPair {
    Field u, f;
    double radius = 0.0;
};

// u: smooth bump exp(-1/(1 - |v-c|^2/R^2)) of random sign and height, R at least
// three cells, support inside the box; f: one or two random Gaussians.
inline HardyPair random_hardy_pair(const Grid& g, Rng& rng) {
    const int d = g.d;
    const double h = g.h();
    HardyPair p;
    double R = std::max(2.0, 3.0 * h) * (1.0 + 0.5 * rng.uniform());
    R = std::min(R, g.L - h);
    double room = std::max(0.0, g.L - R - h);
    Point c = g.center;
    for (int k = 0; k < d; ++k) c[k] += (2.0 * rng.uniform() - 1.0) * room;
    double amp = (0.5 + 1.5 * rng.uniform()) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    GaussianSum gs;
    int parts = rng.uniform() < 0.5 ? 1 : 2;
    for (int j = 0; j < parts; ++j) {
        Gaussian gi;
        gi.mass = 0.5 + rng.uniform();
        for (int k = 0; k < d; ++k) gi.mean[k] = g.center[k] + (2.0 * rng.uniform() - 1.0) * 0.5 * g.L;
        gi.variance = 0.5 + 1.5 * rng.uniform();
        gs.parts.push_back(gi);
    }
    p.f = build_field(g, gs);
    p.u = Field(g);
    for (std::size_t i = 0; i < p.u.size(); ++i) {
        Point v = g.node(i);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) r2 += (v[k] - c[k]) * (v[k] - c[k]);
        double t = r2 / (R * R);
        p.u[i] = t < 1.0 ? amp * std::exp(-1.0 / (1.0 - t)) : 0.0;
    }
    p.radius = R;
    return p;
}

inline std::vector<InequalityReport> hardy_suite(const ModelParams& params, const Grid& g, int pairs,
                                                 std::uint64_t seed) {
    Rng rng(seed);
    std::vector<HardyPair> inputs;
    for (int k = 0; k < pairs; ++k) inputs.push_back(random_hardy_pair(g, rng));
    std::vector<InequalityReport> out(pairs);
    parallel_for(inputs.size(), [&](std::size_t k) {
        SpectralPlan plan(g, params);
        out[k] = hardy_gap(plan, inputs[k].u, inputs[k].f);
    });
    return out;
}

struct LandauSweep {
    std::vector<double> s_values, gaps;
    double s_near_one = 1.0 - 1e-4;
    double c1_rel_error = 0.0;
    bool monotone = true;
    bool passed = true;
};

// ||Q - Q_IL||_2 / ||Q_IL||_2 on f along s_values, plus |c1 - a| / a at s_near_one.
inline LandauSweep landau_sweep(int d, double gamma, const Field& f, const std::vector<double>& s_values) {
    LandauSweep out;
    out.s_values = s_values;
    for (double s : s_values) {
        ModelParams p{d, gamma, s};
        SpectralPlan plan(f.grid, p);
        Field q = q_carleman(plan, f, f), ql = q_landau_iso(plan, f, f);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            num += (q[i] - ql[i]) * (q[i] - ql[i]);
            den += ql[i] * ql[i];
        }
        out.gaps.push_back(den > 0.0 ? std::sqrt(num / den) : 0.0);
    }
    for (std::size_t k = 1; k < out.gaps.size(); ++k)
        if (!(out.gaps[k] < out.gaps[k - 1])) out.monotone = false;
    auto c = compute_constants({d, gamma, out.s_near_one});
    out.c1_rel_error = std::abs(c.c1 - *c.a_landau) / std::abs(*c.a_landau);
    out.passed = out.monotone && out.c1_rel_error < 1e-3;
    return out;
}

}  // namespace isoboltz
