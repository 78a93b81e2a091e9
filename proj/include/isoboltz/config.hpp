#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "sim.hpp"

namespace isoboltz {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) + "' has the wrong type");
    }
}

inline Point get_point(const json& j, const char* key, const std::string& where, int d) {
    Point p{0.0, 0.0, 0.0};
    if (!j.contains(key)) return p;
    auto v = get<std::vector<double>>(j, key, where, {});
    // trailing zeros are dropped so that lowering d does not invalidate a config
    while (static_cast<int>(v.size()) > d && v.back() == 0.0) v.pop_back();
    if (static_cast<int>(v.size()) > d || (!v.empty() && static_cast<int>(v.size()) < d))
        throw ConfigError("config key '" + where + "." + key + "' needs " + std::to_string(d) + " entries");
    v.resize(d, 0.0);
    for (int k = 0; k < d; ++k) p[k] = v[k];
    return p;
}

inline json point_json(const Point& p, int d) { return std::vector<double>(p.begin(), p.begin() + d); }

inline Gaussian gaussian_from(const json& j, const std::string& where, int d) {
    Gaussian g;
    g.mass = get(j, "mass", where, 1.0);
    g.mean = get_point(j, "mean", where, d);
    g.variance = get(j, "variance", where, 1.0);
    return g;
}

inline json gaussian_json(const Gaussian& g, int d) {
    return {{"mass", g.mass}, {"mean", point_json(g.mean, d)}, {"variance", g.variance}};
}

}  // namespace detail

inline json to_json(const SimConfig& c) {
    const int d = c.params.d;
    json j;
    j["params"] = {{"d", d}, {"gamma", c.params.gamma}, {"s", c.params.s}};
    j["grid"] = {{"n", c.grid.n}, {"L", c.grid.L}, {"center", detail::point_json(c.grid.center, d)}};
    if (auto* g = std::get_if<Gaussian>(&c.ic)) {
        j["ic"] = detail::gaussian_json(*g, d);
        j["ic"]["kind"] = "gaussian";
    } else if (auto* gs = std::get_if<GaussianSum>(&c.ic)) {
        json parts = json::array();
        for (const auto& p : gs->parts) parts.push_back(detail::gaussian_json(p, d));
        j["ic"] = {{"kind", "gaussian_sum"}, {"parts", parts}};
    } else {
        j["ic"] = {{"kind", "file"}, {"path", std::get<FileIC>(c.ic).path}};
    }
    j["t_end"] = c.t_end;
    if (c.dt_policy.kind == DtPolicy::cfl)
        j["dt_policy"] = {{"kind", "cfl"}, {"factor", c.dt_policy.factor}};
    else
        j["dt_policy"] = {{"kind", "fixed"}, {"dt", c.dt_policy.dt}};
    j["output_every"] = c.output_every;
    j["snapshot_every"] = c.snapshot_every;
    j["q_list"] = c.q_list;
    j["floor"] = c.floor == FloorPolicy::clamp ? "clamp" : "none";
    j["seed"] = c.seed;
    return j;
}

// Missing keys take the SimConfig defaults; unknown keys are rejected.
inline SimConfig sim_config_from_json(const json& j) {
    using detail::get;
    SimConfig c;
    detail::reject_unknown(j, "", {"params", "grid", "ic", "t_end", "dt_policy", "output_every", "snapshot_every",
                                   "q_list", "floor", "seed"});
    if (j.contains("params")) {
        const auto& p = j["params"];
        detail::reject_unknown(p, "params", {"d", "gamma", "s"});
        c.params.d = get(p, "d", "params", c.params.d);
        c.params.gamma = get(p, "gamma", "params", c.params.gamma);
        c.params.s = get(p, "s", "params", c.params.s);
    }
    const int d = c.params.d;
    if (d < 1 || d > 3) throw ConfigError("params.d must be 1, 2 or 3");
    c.grid.d = d;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        detail::reject_unknown(g, "grid", {"n", "L", "center"});
        c.grid.n = get(g, "n", "grid", c.grid.n);
        c.grid.L = get(g, "L", "grid", c.grid.L);
        c.grid.center = detail::get_point(g, "center", "grid", d);
    }
    if (j.contains("ic")) {
        const auto& ic = j["ic"];
        std::string kind = get<std::string>(ic, "kind", "ic", "gaussian");
        if (kind == "gaussian") {
            detail::reject_unknown(ic, "ic", {"kind", "mass", "mean", "variance"});
            c.ic = detail::gaussian_from(ic, "ic", d);
        } else if (kind == "gaussian_sum") {
            detail::reject_unknown(ic, "ic", {"kind", "parts"});
            if (!ic.contains("parts") || !ic["parts"].is_array() || ic["parts"].empty())
                throw ConfigError("ic.parts must be a non-empty array");
            GaussianSum gs;
            for (std::size_t k = 0; k < ic["parts"].size(); ++k) {
                std::string where = "ic.parts." + std::to_string(k);
                detail::reject_unknown(ic["parts"][k], where, {"mass", "mean", "variance"});
                gs.parts.push_back(detail::gaussian_from(ic["parts"][k], where, d));
            }
            c.ic = gs;
        } else if (kind == "file") {
            detail::reject_unknown(ic, "ic", {"kind", "path"});
            c.ic = FileIC{get<std::string>(ic, "path", "ic", "")};
        } else {
            throw ConfigError("ic.kind must be gaussian, gaussian_sum or file");
        }
    }
    c.t_end = get(j, "t_end", "", c.t_end);
    if (j.contains("dt_policy")) {
        const auto& dp = j["dt_policy"];
        std::string kind = get<std::string>(dp, "kind", "dt_policy", "cfl");
        if (kind == "cfl") {
            detail::reject_unknown(dp, "dt_policy", {"kind", "factor"});
            c.dt_policy.kind = DtPolicy::cfl;
            c.dt_policy.factor = get(dp, "factor", "dt_policy", c.dt_policy.factor);
        } else if (kind == "fixed") {
            detail::reject_unknown(dp, "dt_policy", {"kind", "dt"});
            c.dt_policy.kind = DtPolicy::fixed;
            c.dt_policy.dt = get(dp, "dt", "dt_policy", c.dt_policy.dt);
        } else {
            throw ConfigError("dt_policy.kind must be cfl or fixed");
        }
    }
    c.output_every = get(j, "output_every", "", c.output_every);
    c.snapshot_every = get(j, "snapshot_every", "", c.snapshot_every);
    c.q_list = get(j, "q_list", "", c.q_list);
    std::string floor = get<std::string>(j, "floor", "", "none");
    if (floor == "none") c.floor = FloorPolicy::none;
    else if (floor == "clamp") c.floor = FloorPolicy::clamp;
    else throw ConfigError("floor must be none or clamp");
    c.seed = get(j, "seed", "", c.seed);
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

// Applies "a.b.c=value"; the value is parsed as JSON, falling back to a string.
inline void apply_override(json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
        bool index = node->is_array() && part.find_first_not_of("0123456789") == std::string::npos;
        json* next;
        if (index) {
            std::size_t k = std::stoul(part);
            if (k >= node->size()) throw ConfigError("override key '" + key + "' indexes past the end");
            next = &(*node)[k];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a scalar");
            next = &(*node)[part];
        }
        if (dot == std::string::npos) {
            *next = value;
            return;
        }
        node = next;
        start = dot + 1;
    }
}

}  // namespace isoboltz
