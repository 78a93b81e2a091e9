#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "checks.hpp"
#include "config.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "sim.hpp"

namespace isoboltz {

enum ExitCode { exit_ok = 0, exit_failed = 1, exit_config = 2, exit_blowup = 3 };

struct CliConfig {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "isoboltz_out";
    std::vector<std::string> overrides;
    std::optional<int> d;
    std::optional<double> gamma, s;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline json report_json(const InequalityReport& r) {
    return {{"lhs", r.lhs},       {"rhs", r.rhs},         {"slack", r.slack},    {"passed", r.passed},
            {"tolerance", r.tolerance}, {"method", r.method}, {"samples", r.samples}};
}

inline json verdict_json(const MonitorVerdict& v) {
    json j = {{"name", v.name}, {"passed", v.passed}, {"margin", v.margin}, {"t_worst", v.t_worst},
              {"asserted", v.asserted}};
    if (!v.fitted.empty()) j["fitted"] = v.fitted;
    return j;
}

inline json constants_json(const ModelParams& p) {
    auto c = compute_constants(p);
    json j = {{"d", p.d},       {"gamma", p.gamma}, {"s", p.s},         {"c_dgs", c.c_dgs},
              {"c1", c.c1},     {"c2", c.c2},       {"cR", c.cR},       {"CH", c.CH},
              {"ratio", c.ratio}, {"frac_norm", c.frac_norm}, {"threshold", p.threshold()}};
    j["a_landau"] = c.a_landau ? json(*c.a_landau) : json(nullptr);
    j["c_landau"] = c.c_landau ? json(*c.c_landau) : json(nullptr);
    return j;
}

// Defaults, then the config file, then --set, then the named flags.
inline SimConfig resolve_config(const CliConfig& cli, json base) {
    if (!cli.config_path.empty()) base.merge_patch(read_json_file(cli.config_path));
    for (const auto& o : cli.overrides) apply_override(base, o);
    if (cli.d) base["params"]["d"] = *cli.d;
    if (cli.gamma) base["params"]["gamma"] = *cli.gamma;
    if (cli.s) base["params"]["s"] = *cli.s;
    if (cli.seed) base["seed"] = *cli.seed;
    return sim_config_from_json(base);
}

inline std::filesystem::path prepare_out(const CliConfig& cli, const SimConfig& cfg) {
    std::filesystem::path out(cli.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string());
    std::ofstream(out / "resolved_config.json") << to_json(cfg).dump(2) << '\n';
    return out;
}

inline int cmd_constants(const CliConfig& cli) {
    ModelParams p;
    p.d = cli.d.value_or(p.d);
    p.gamma = cli.gamma.value_or(p.gamma);
    p.s = cli.s.value_or(p.s);
    std::cout << constants_json(p).dump(2) << '\n';
    return exit_ok;
}

inline int cmd_scan_phi(const CliConfig& cli, std::optional<double> from, std::optional<double> to, int n) {
    const int d = cli.d.value_or(3);
    const double s = cli.s.value_or(0.85);
    const double th = -(d + 4.0 * s) / 3.0;
    double lo = from.value_or(std::max(th - 0.25, -d + 0.05));
    double hi = to.value_or(std::min(th + 0.25, -2.0 * s));
    std::filesystem::path out(cli.out_dir);
    std::filesystem::create_directories(out);
    json summary = {{"d", d}, {"s", s}, {"from", lo}, {"to", hi}, {"n", n}, {"threshold", th}};
    ThresholdScan scan;
    bool found = true;
    try {
        scan = threshold_scan(d, s, lo, hi, n);
    } catch (const NoRootError&) {
        found = false;
        ModelParams probe{d, lo, s};
        probe.validate();
        for (int k = 0; k < n; ++k) {
            double g = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
            double f = detail::phi_or_limit(d, s, g);
            scan.samples.push_back({g, f, std::isinf(f) ? 0.0 : 1.0 / (2.0 * f - 1.0)});
        }
    }
    std::ofstream csv(out / "scan_phi.csv");
    csv << "gamma,phi,ratio\n";
    char buf[128];
    for (const auto& x : scan.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x.gamma, x.phi, x.ratio);
        csv << buf;
    }
    summary["csv"] = (out / "scan_phi.csv").string();
    summary["root"] = found ? json(scan.root) : json(nullptr);
    bool passed = found && std::abs(scan.root - th) <= 1e-8;
    summary["passed"] = passed;
    std::cout << summary.dump() << '\n';
    return passed ? exit_ok : exit_failed;
}

inline int cmd_check_operator(const CliConfig& cli, int nodes, long samples) {
    SimConfig cfg = resolve_config(cli, to_json(SimConfig{}));
    prepare_out(cli, cfg);
    Field f = build_field(cfg.grid, cfg.ic);
    bool ok = true;
    std::ofstream log(std::filesystem::path(cli.out_dir) / "check_operator.jsonl");
    auto emit = [&](const char* check, const NodeReport& r, bool with_v) {
        json j = report_json(r.report);
        j["check"] = check;
        j["name"] = r.name;
        j["grid_value"] = r.grid;
        j["oracle_value"] = r.oracle;
        j["std_error"] = r.std_error;
        if (with_v) j["v"] = std::vector<double>(r.v.begin(), r.v.begin() + cfg.grid.d);
        std::cout << j.dump() << '\n';
        log << j.dump() << '\n';
        ok = ok && r.report.passed;
    };
    for (const auto& r : operator_check(cfg.params, f, nodes, samples, cfg.seed)) emit("form_equivalence", r, true);
    for (const auto& r : weak_moment_check(cfg.params, f, samples, cfg.seed + 1000)) emit("weak_moment", r, false);
    return ok ? exit_ok : exit_failed;
}

inline json hardy_base() {
    SimConfig c;
    c.grid.n = 12;
    c.grid.L = 4.0;
    return to_json(c);
}

inline int cmd_check_hardy(const CliConfig& cli, int pairs) {
    SimConfig cfg = resolve_config(cli, hardy_base());
    prepare_out(cli, cfg);
    auto reports = hardy_suite(cfg.params, cfg.grid, pairs, cfg.seed);
    std::ofstream log(std::filesystem::path(cli.out_dir) / "check_hardy.jsonl");
    bool ok = true;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        json j = report_json(reports[k]);
        j["check"] = "hardy";
        j["pair"] = k;
        std::cout << j.dump() << '\n';
        log << j.dump() << '\n';
        ok = ok && reports[k].passed;
    }
    return ok ? exit_ok : exit_failed;
}

inline json landau_base() {
    SimConfig c;
    c.params.gamma = -2.5;
    c.params.s = 0.9;
    return to_json(c);
}

inline int cmd_landau_limit(const CliConfig& cli) {
    SimConfig cfg = resolve_config(cli, landau_base());
    prepare_out(cli, cfg);
    Field f = build_field(cfg.grid, cfg.ic);
    auto sweep = landau_sweep(cfg.params.d, cfg.params.gamma, f, {0.9, 0.99, 0.999});
    std::ofstream log(std::filesystem::path(cli.out_dir) / "landau_limit.csv");
    log << "s,gap\n";
    char buf[96];
    for (std::size_t k = 0; k < sweep.gaps.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sweep.s_values[k], sweep.gaps[k]);
        log << buf;
    }
    json j = {{"d", cfg.params.d},           {"gamma", cfg.params.gamma},     {"s", sweep.s_values},
              {"gap", sweep.gaps},           {"monotone", sweep.monotone},    {"s_near_one", sweep.s_near_one},
              {"c1_rel_error", sweep.c1_rel_error}, {"passed", sweep.passed}};
    std::cout << j.dump() << '\n';
    return sweep.passed ? exit_ok : exit_failed;
}

inline int cmd_simulate(const CliConfig& cli) {
    SimConfig cfg = resolve_config(cli, to_json(SimConfig{}));
    auto out = prepare_out(cli, cfg);
    std::ofstream csv(out / "diagnostics.csv");
    csv << diagnostics_csv_header(cfg.grid.d, cfg.q_list) << '\n';
    RunObserver obs;
    obs.on_record = [&](const DiagnosticsRecord& r) { csv << diagnostics_csv_row(r) << '\n'; };
    obs.on_snapshot = [&](int step, double t, const Field& f) {
        write_snapshot(out / ("snap_" + std::to_string(step)), f, t, cfg.params);
    };
    RunResult res;
    try {
        res = run(cfg, obs);
    } catch (const BlowupError& e) {
        csv.flush();
        std::cerr << "blow-up at t = " << e.time << ": " << e.what() << '\n';
        return exit_blowup;
    }
    std::ofstream vj(out / "verdicts.jsonl");
    for (const auto& v : res.verdicts) {
        vj << verdict_json(v).dump() << '\n';
        std::cout << verdict_json(v).dump() << '\n';
    }
    return all_asserted_passed(res.verdicts) ? exit_ok : exit_failed;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Spatially homogeneous isotropic Boltzmann equation: constants, checks and simulation"};
    app.require_subcommand(1);
    CliConfig cli;
    std::optional<double> scan_from, scan_to;
    int scan_n = 41, nodes = 10, pairs = 20;
    long samples = 1000000;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", cli.out_dir, "output directory");
        sub->add_option("--d", cli.d, "dimension");
        sub->add_option("--gamma", cli.gamma, "kinetic exponent");
        sub->add_option("--s", cli.s, "angular exponent");
        sub->add_option("--seed", cli.seed, "random seed");
        sub->add_option("--set", cli.overrides, "override a config key, key=value (repeatable)");
    };
    auto* constants = app.add_subcommand("constants", "print the constant set as JSON");
    auto* scan = app.add_subcommand("scan-phi", "scan Phi(d, s, gamma) and write scan_phi.csv");
    auto* op = app.add_subcommand("check-operator", "cross-check q_carleman against the integral form");
    auto* hardy = app.add_subcommand("check-hardy", "run the Hardy inequality suite");
    auto* landau = app.add_subcommand("landau-limit", "compare with the Landau operator as s -> 1");
    auto* sim = app.add_subcommand("simulate", "integrate in time and evaluate the monitors");
    for (auto* sub : {constants, scan, op, hardy, landau, sim}) common(sub);
    scan->add_option("--from", scan_from, "lower gamma");
    scan->add_option("--to", scan_to, "upper gamma");
    scan->add_option("--n", scan_n, "number of samples")->check(CLI::Range(2, 1000000));
    op->add_option("--nodes", nodes, "number of nodes")->check(CLI::Range(1, 10000));
    op->add_option("--samples", samples, "Monte-Carlo samples per node");
    hardy->add_option("--pairs", pairs, "number of random (u, f) pairs")->check(CLI::Range(1, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    try {
        if (*constants) return detail::cmd_constants(cli);
        if (*scan) return detail::cmd_scan_phi(cli, scan_from, scan_to, scan_n);
        if (*op) return detail::cmd_check_operator(cli, nodes, samples);
        if (*hardy) return detail::cmd_check_hardy(cli, pairs);
        if (*landau) return detail::cmd_landau_limit(cli);
        if (*sim) return detail::cmd_simulate(cli);
    } catch (const BlowupError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_blowup;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const PoleError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const FileFormatError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const CostError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_config;
}

}  // namespace isoboltz
