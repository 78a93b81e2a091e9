#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "collision.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace isoboltz {

struct DtPolicy {
    enum Kind { fixed, cfl };
    Kind kind = cfl;
    double dt = 0.01;     // fixed
    double factor = 0.5;  // cfl
};

enum class FloorPolicy { none, clamp };

struct SimConfig {
    ModelParams params{3, -2.1, 0.85};
    Grid grid{3, 32, 8.0};
    InitialCondition ic = Gaussian{1.0, {0.0, 0.0, 0.0}, 1.0};
    double t_end = 1.0;
    DtPolicy dt_policy;
    int output_every = 1;
    int snapshot_every = 0;
    std::vector<double> q_list{2.0, 4.0};
    FloorPolicy floor = FloorPolicy::none;
    std::uint64_t seed = 0;

    void validate() const {
        params.validate();
        grid.validate();
        if (params.d != grid.d) throw ConfigError("params.d and grid.d differ");
        if (!params.very_soft()) throw ConfigError("params must satisfy gamma + 2s < 0");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
        if (dt_policy.kind == DtPolicy::cfl && !(dt_policy.factor > 0.0 && dt_policy.factor <= 1.0))
            throw ConfigError("cfl factor must lie in (0, 1]");
        if (dt_policy.kind == DtPolicy::fixed && !(dt_policy.dt > 0.0)) throw ConfigError("fixed dt must be positive");
        if (output_every < 1) throw ConfigError("output_every must be at least 1");
        if (snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
    }
};

struct MonitorVerdict {
    std::string name;
    bool passed = true;
    bool asserted = true;  // false: the guarantee does not apply, result is reported only
    double margin = 0.0;
    double t_worst = 0.0;
    std::map<std::string, double> fitted;
};

namespace detail {

struct RateBounds {
    double max_A = 0.0;   // max c A
    double max_B = 0.0;   // max c c_R [f * |.|^gamma]
    double max_DA = 0.0;  // max |c L_s A|
};

inline RateBounds rate_bounds(SpectralPlan& plan, const Field& f) {
    const auto& p = plan.params();
    const auto cs = compute_constants(p);
    const double c = cs.c_dgs;
    const auto& K = plan.kernel_spectrum(p.gamma + 2.0 * p.s);
    const auto& Kg = plan.kernel_spectrum(p.gamma);
    const auto& m = plan.multiplier();
    std::vector<double> ef, A, B, DA;
    std::vector<cplx> F, tmp;
    plan.embed(f, ef, true);
    plan.forward(ef, F);
    tmp.resize(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) tmp[i] = F[i] * K[i];
    plan.inverse(tmp, A);
    for (std::size_t i = 0; i < F.size(); ++i) tmp[i] = F[i] * Kg[i];
    plan.inverse(tmp, B);
    for (std::size_t i = 0; i < F.size(); ++i) tmp[i] = F[i] * (K[i] * m[i]);
    plan.inverse(tmp, DA);
    RateBounds r;
    for (double a : A) r.max_A = std::max(r.max_A, c * a);
    for (double b : B) r.max_B = std::max(r.max_B, c * cs.cR * b);
    for (double a : DA) r.max_DA = std::max(r.max_DA, std::abs(c * a));
    return r;
}

}  // namespace detail

// factor / (max c A |xi_max|^{2s} / frac_norm + max c c_R [f * |.|^gamma]);
// `fallback` when f = 0.
inline double stable_dt(SpectralPlan& plan, const Field& f, double factor,
                        double fallback = std::numeric_limits<double>::infinity()) {
    auto r = detail::rate_bounds(plan, f);
    const double s = plan.params().s;
    double rate = r.max_A * std::pow(plan.max_abs_xi(), 2.0 * s) / plan.frac_norm_value() + r.max_B;
    if (!(rate > 0.0)) return fallback;
    return factor / rate;
}

struct StepResult {
    Field f;
    double min_before_floor = 0.0;
};

inline void check_blowup(const Field& f, double t) {
    for (double v : f.values)
        if (!std::isfinite(v) || std::abs(v) > 1e12) throw BlowupError("solution blew up", t);
}

inline StepResult step_rk4(SpectralPlan& plan, const Field& f, double dt, FloorPolicy floor = FloorPolicy::none,
                           double t = 0.0) {
    auto stage = [&](const Field& base, const Field& k, double a) {
        Field out = base;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * k[i];
        return out;
    };
    // the box truncation leaks momentum; each stage is projected back
    auto rhs = [&](const Field& x) { return conserve_moments(q_carleman(plan, x, x), x); };
    Field k1 = rhs(f);
    Field f2 = stage(f, k1, 0.5 * dt);
    Field k2 = rhs(f2);
    Field f3 = stage(f, k2, 0.5 * dt);
    Field k3 = rhs(f3);
    Field f4 = stage(f, k3, dt);
    Field k4 = rhs(f4);
    StepResult r;
    r.f = f;
    for (std::size_t i = 0; i < f.size(); ++i)
        r.f[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_blowup(r.f, t + dt);
    r.min_before_floor = *std::min_element(r.f.values.begin(), r.f.values.end());
    if (floor == FloorPolicy::clamp)
        for (double& v : r.f.values) v = std::max(v, 0.0);
    return r;
}

struct RunObserver {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(int step, double t, const Field&)> on_snapshot;
};

struct RunResult {
    std::vector<DiagnosticsRecord> series;  // cadence ticks
    std::vector<DiagnosticsRecord> steps;   // every step, used by the monitors
    std::vector<Snapshot> snapshots;
    std::vector<MonitorVerdict> verdicts;
    std::vector<double> dts;
};

namespace detail {

struct MonitorInputs {
    const SimConfig& cfg;
    const std::vector<DiagnosticsRecord>& steps;
    double energy_rate0;  // d/dt energy at t = 0
    double kappa;         // reaction rate bound at t = 0
    double l1_0;
};

inline bool l2_guaranteed(const ModelParams& p) {
    return p.main_theorem_range() || (p.very_soft() && p.gamma >= p.threshold());
}

inline bool energy_lemma_applies(const ModelParams& p) {
    double lo = std::max(-0.5 * p.d - 1.0, -p.d - 1.0 - 2.0 * p.s);
    return p.gamma > lo && p.gamma < -2.0 && l2_guaranteed(p);
}

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Sequence should not increase: worst of (tol * scale_k - (x_{k+1} - x_k)) / scale_k.
inline MonitorVerdict nonincreasing(const std::string& name, const std::vector<DiagnosticsRecord>& steps,
                                    double (*get)(const DiagnosticsRecord&), double tol, bool asserted) {
    MonitorVerdict v{name, true, asserted, inf, 0.0, {}};
    for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
        double a = get(steps[k]), b = get(steps[k + 1]);
        double scale = std::max(std::abs(a), 1e-300);
        double margin = (tol * scale - (b - a)) / scale;
        if (margin < v.margin) {
            v.margin = margin;
            v.t_worst = steps[k + 1].t;
        }
    }
    if (!std::isfinite(v.margin)) v.margin = tol;
    v.passed = v.margin >= 0.0;
    return v;
}

inline std::vector<MonitorVerdict> evaluate_monitors(const MonitorInputs& in) {
    const auto& steps = in.steps;
    const auto& p = in.cfg.params;
    const double L = in.cfg.grid.L;
    std::vector<MonitorVerdict> out;
    const bool l2_ok = l2_guaranteed(p);

    out.push_back(nonincreasing("l2_nonincreasing", steps, [](const DiagnosticsRecord& r) { return r.l2; }, 1e-6,
                                l2_ok));

    {
        const double m0 = steps.front().mass;
        MonitorVerdict v{"mass_conservation", true, true, inf, 0.0, {}};
        for (const auto& r : steps) {
            double drift = m0 != 0.0 ? std::abs(r.mass - m0) / std::abs(m0) : std::abs(r.mass);
            double margin = 1e-6 - drift;
            if (margin < v.margin) {
                v.margin = margin;
                v.t_worst = r.t;
            }
        }
        if (!std::isfinite(v.margin)) v.margin = 1e-6;
        v.passed = v.margin >= 0.0;
        out.push_back(v);
    }
    {
        const double m0 = std::abs(steps.front().mass);
        const double tol = 1e-6 * m0 * L;
        MonitorVerdict v{"momentum_conservation", true, true, inf, 0.0, {}};
        for (const auto& r : steps) {
            double drift = 0.0;
            for (std::size_t k = 0; k < r.momentum.size(); ++k)
                drift = std::max(drift, std::abs(r.momentum[k] - steps.front().momentum[k]));
            if (tol - drift < v.margin) {
                v.margin = tol - drift;
                v.t_worst = r.t;
            }
        }
        if (!std::isfinite(v.margin)) v.margin = tol;
        v.passed = v.margin >= 0.0;
        out.push_back(v);
    }

    out.push_back(nonincreasing("entropy_nonincreasing", steps, [](const DiagnosticsRecord& r) { return r.entropy; },
                                1e-6, true));

    {
        // E(t) <= E0 e^{k t} + C'(e^{k t} - 1), k = C N0, C' = C N0, fitted so the
        // envelope's initial slope matches the initial energy production.
        const double E0 = steps.front().energy;
        const double N0 = in.l1_0 + steps.front().l2;
        const double rate = std::max(in.energy_rate0, 0.0);
        double kappa = 0.5 * (-E0 + std::sqrt(E0 * E0 + 4.0 * rate));
        double C = N0 > 0.0 ? kappa / N0 : 0.0;
        MonitorVerdict v{"energy_envelope", true, energy_lemma_applies(p), 0.0, 0.0, {}};
        v.margin = std::numeric_limits<double>::infinity();
        for (const auto& r : steps) {
            double e = std::exp(kappa * r.t);
            double env = E0 * e + kappa * (e - 1.0);
            double scale = std::max(std::abs(env), 1e-300);
            double margin = (env - r.energy) / scale + 1e-9;
            if (r.t > 0.0 && margin < v.margin) {
                v.margin = margin;
                v.t_worst = r.t;
            }
        }
        if (!std::isfinite(v.margin)) v.margin = 0.0;
        v.passed = v.margin >= 0.0;
        v.fitted = {{"C", C}, {"C_prime", kappa}, {"rate", kappa}, {"N0", N0}};
        out.push_back(v);
    }
    {
        const double t_end = steps.back().t;
        const double ex = p.d / (2.0 * p.s);
        const double linf0 = steps.front().linf;
        const double N = linf0 / (std::pow(t_end, -ex) + 1.0);
        MonitorVerdict v{"linf_barrier", true, l2_ok, 0.0, 0.0, {{"N", N}}};
        v.margin = std::numeric_limits<double>::infinity();
        for (const auto& r : steps) {
            if (!std::isfinite(r.linf)) {
                v.margin = -std::numeric_limits<double>::infinity();
                v.t_worst = r.t;
                break;
            }
            if (r.t < 0.5 * t_end || r.t <= 0.0) continue;
            double bound = N * (std::pow(r.t, -ex) + 1.0);
            double margin = bound > 0.0 ? (bound - r.linf) / bound + 1e-9 : (r.linf == 0.0 ? 0.0 : -1.0);
            if (margin < v.margin) {
                v.margin = margin;
                v.t_worst = r.t;
            }
        }
        if (!std::isfinite(v.margin) && v.margin > 0) v.margin = 0.0;
        v.passed = v.margin >= 0.0;
        out.push_back(v);
    }
    for (std::size_t q = 0; q < in.cfg.q_list.size(); ++q) {
        char name[64];
        std::snprintf(name, sizeof name, "weighted_decay_q%g", in.cfg.q_list[q]);
        const double w0 = steps.front().wsup[q];
        MonitorVerdict v{name, true, l2_ok, 0.0, 0.0, {{"kappa", in.kappa}}};
        v.margin = std::numeric_limits<double>::infinity();
        for (const auto& r : steps) {
            if (r.t <= 0.0) continue;
            double bound = w0 * std::exp(in.kappa * r.t);
            double margin = bound > 0.0 ? (bound - r.wsup[q]) / bound + 1e-9 : (r.wsup[q] == 0.0 ? 0.0 : -1.0);
            if (margin < v.margin) {
                v.margin = margin;
                v.t_worst = r.t;
            }
        }
        if (!std::isfinite(v.margin)) v.margin = 0.0;
        v.passed = v.margin >= 0.0;
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

inline RunResult run(const SimConfig& cfg, const RunObserver& obs = {}) {
    cfg.validate();
    SpectralPlan plan(cfg.grid, cfg.params);
    Field f = build_field(cfg.grid, cfg.ic);
    RunResult res;
    auto record = [&](const DiagnosticsRecord& r, bool tick) {
        res.steps.push_back(r);
        if (tick) {
            res.series.push_back(r);
            if (obs.on_record) obs.on_record(r);
        }
    };
    auto snapshot = [&](int step, double t, const Field& g) {
        res.snapshots.push_back({g, t, cfg.params});
        if (obs.on_snapshot) obs.on_snapshot(step, t, g);
    };

    // t = 0 rates for the fitted monitors
    Field q0 = q_carleman(plan, f, f);
    double e_rate = 0.0;
    for (std::size_t i = 0; i < q0.size(); ++i) {
        Point v = cfg.grid.node(i);
        double r2 = 0.0;
        for (int k = 0; k < cfg.grid.d; ++k) r2 += v[k] * v[k];
        e_rate += r2 * q0[i];
    }
    e_rate *= cfg.grid.cell();
    const double kappa = detail::rate_bounds(plan, f).max_DA;
    double l1 = 0.0;
    for (double v : f.values) l1 += std::abs(v);
    l1 *= cfg.grid.cell();

    double t = 0.0;
    int step = 0;
    record(diagnostics(f, t, cfg.q_list), true);
    snapshot(0, t, f);
    while (t < cfg.t_end) {
        double dt = cfg.dt_policy.kind == DtPolicy::fixed ? cfg.dt_policy.dt
                                                          : stable_dt(plan, f, cfg.dt_policy.factor, cfg.t_end);
        bool last = t + dt >= cfg.t_end * (1.0 - 1e-12);
        if (last) dt = cfg.t_end - t;
        StepResult sr;
        try {
            sr = step_rk4(plan, f, dt, cfg.floor, t);
        } catch (const BlowupError&) {
            snapshot(step, t, f);
            throw;
        }
        f = std::move(sr.f);
        t = last ? cfg.t_end : t + dt;
        ++step;
        res.dts.push_back(dt);
        auto rec = diagnostics(f, t, cfg.q_list);
        rec.min_f = std::min(rec.min_f, sr.min_before_floor);
        record(rec, last || step % cfg.output_every == 0);
        if (!last && cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) snapshot(step, t, f);
        if (last) break;
    }
    snapshot(step, t, f);
    res.verdicts = detail::evaluate_monitors({cfg, res.steps, e_rate, kappa, l1});
    return res;
}

inline bool all_asserted_passed(const std::vector<MonitorVerdict>& vs) {
    for (const auto& v : vs)
        if (v.asserted && !v.passed) return false;
    return true;
}

}  // namespace isoboltz
