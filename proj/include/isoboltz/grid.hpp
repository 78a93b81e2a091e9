#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "constants.hpp"
#include "errors.hpp"

namespace isoboltz {

using Point = std::array<double, 3>;

// Tensor grid on center + [-L, L)^d, nodes center - L + i h.
struct Grid {
    int d = 3;
    int n = 32;
    double L = 8.0;
    Point center{0.0, 0.0, 0.0};

    double h() const { return 2.0 * L / n; }
    double cell() const { return std::pow(h(), d); }
    std::size_t size() const {
        std::size_t m = 1;
        for (int k = 0; k < d; ++k) m *= static_cast<std::size_t>(n);
        return m;
    }
    double coord(int axis, int i) const { return center[axis] - L + i * h(); }

    void validate() const {
        if (d < 1 || d > 3) throw DomainError("Grid: d must be 1, 2 or 3");
        if (n < 8 || n % 2 != 0) throw DomainError("Grid: n must be even and at least 8");
        if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("Grid: L must be positive");
    }

    // Multi-index of a flat row-major index.
    std::array<int, 3> index(std::size_t flat) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int k = d - 1; k >= 0; --k) {
            ix[k] = static_cast<int>(flat % n);
            flat /= n;
        }
        return ix;
    }
    std::size_t flat(const std::array<int, 3>& ix) const {
        std::size_t f = 0;
        for (int k = 0; k < d; ++k) f = f * n + ix[k];
        return f;
    }
    Point node(std::size_t flat_index) const {
        auto ix = index(flat_index);
        Point v{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) v[k] = coord(k, ix[k]);
        return v;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.d == b.d && a.n == b.n && a.L == b.L && a.center == b.center;
    }
};

struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }

    // Sum of values * h^d.
    double integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * grid.cell();
    }
};

inline void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!(a.grid == b.grid)) throw DomainError(std::string(what) + ": fields live on different grids");
}

inline double japanese(const Point& v, int d) {
    double r2 = 1.0;
    for (int k = 0; k < d; ++k) r2 += v[k] * v[k];
    return std::sqrt(r2);
}

struct Gaussian {
    double mass = 1.0;
    Point mean{0.0, 0.0, 0.0};
    double variance = 1.0;

    double operator()(const Point& v, int d) const {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) r2 += (v[k] - mean[k]) * (v[k] - mean[k]);
        return mass * std::pow(2.0 * std::numbers::pi * variance, -0.5 * d) *
               std::exp(-0.5 * r2 / variance);
    }
};

struct GaussianSum {
    std::vector<Gaussian> parts;
};

struct FileIC {
    std::string path;
};

using InitialCondition = std::variant<Gaussian, GaussianSum, FileIC>;

struct Snapshot {
    Field field;
    double t = 0.0;
    ModelParams params;
};

namespace detail {

inline std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
    std::filesystem::path p = stem;
    p += ext;
    return p;
}

inline void swap_if_big_endian(std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& x : v) {
            std::uint64_t u;
            std::memcpy(&u, &x, 8);
            u = __builtin_bswap64(u);
            std::memcpy(&x, &u, 8);
        }
    }
}

}  // namespace detail

// Writes <stem>.json and <stem>.f64.
inline void write_snapshot(const std::filesystem::path& stem, const Field& f, double t,
                           const ModelParams& params) {
    nlohmann::json j;
    j["d"] = f.grid.d;
    j["n"] = f.grid.n;
    j["L"] = f.grid.L;
    j["center"] = std::vector<double>(f.grid.center.begin(), f.grid.center.begin() + f.grid.d);
    j["t"] = t;
    j["params"] = {{"d", params.d}, {"gamma", params.gamma}, {"s", params.s}};
    {
        std::ofstream js(detail::with_ext(stem, ".json"));
        if (!js) throw FileFormatError("cannot write " + detail::with_ext(stem, ".json").string());
        js << j.dump(2) << '\n';
    }
    std::vector<double> raw = f.values;
    detail::swap_if_big_endian(raw);
    std::ofstream bin(detail::with_ext(stem, ".f64"), std::ios::binary);
    if (!bin) throw FileFormatError("cannot write " + detail::with_ext(stem, ".f64").string());
    bin.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(double)));
}

inline Snapshot read_snapshot(const std::filesystem::path& stem) {
    Snapshot s;
    nlohmann::json j;
    std::ifstream js(detail::with_ext(stem, ".json"));
    if (!js) throw FileFormatError("missing snapshot metadata " + detail::with_ext(stem, ".json").string());
    try {
        js >> j;
        s.field.grid.d = j.at("d").get<int>();
        s.field.grid.n = j.at("n").get<int>();
        s.field.grid.L = j.at("L").get<double>();
        if (j.contains("center")) {
            auto c = j.at("center").get<std::vector<double>>();
            if (static_cast<int>(c.size()) != s.field.grid.d)
                throw FileFormatError("snapshot center has wrong length");
            std::copy(c.begin(), c.end(), s.field.grid.center.begin());
        }
        s.t = j.at("t").get<double>();
        const auto& p = j.at("params");
        s.params = {p.at("d").get<int>(), p.at("gamma").get<double>(), p.at("s").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw FileFormatError(std::string("malformed snapshot metadata: ") + e.what());
    }
    try {
        s.field.grid.validate();
    } catch (const DomainError& e) {
        throw FileFormatError(std::string("snapshot grid invalid: ") + e.what());
    }
    auto bin_path = detail::with_ext(stem, ".f64");
    std::error_code ec;
    auto bytes = std::filesystem::file_size(bin_path, ec);
    if (ec) throw FileFormatError("missing snapshot data " + bin_path.string());
    if (bytes != s.field.grid.size() * sizeof(double))
        throw FileFormatError("snapshot data length does not match n^d");
    s.field.values.resize(s.field.grid.size());
    std::ifstream bin(bin_path, std::ios::binary);
    bin.read(reinterpret_cast<char*>(s.field.values.data()), static_cast<std::streamsize>(bytes));
    if (!bin) throw FileFormatError("short read on " + bin_path.string());
    detail::swap_if_big_endian(s.field.values);
    for (double v : s.field.values)
        if (!std::isfinite(v)) throw FileFormatError("snapshot contains non-finite values");
    return s;
}

inline Field build_field(const Grid& grid, const InitialCondition& ic) {
    grid.validate();
    auto sample = [&](const std::vector<Gaussian>& parts) {
        for (const auto& g : parts)
            if (!(g.variance > 0.0)) throw DomainError("gaussian variance must be positive");
        Field f(grid);
        for (std::size_t i = 0; i < f.size(); ++i) {
            Point v = grid.node(i);
            double s = 0.0;
            for (const auto& g : parts) s += g(v, grid.d);
            f[i] = s;
        }
        return f;
    };
    if (auto* g = std::get_if<Gaussian>(&ic)) return sample({*g});
    if (auto* gs = std::get_if<GaussianSum>(&ic)) return sample(gs->parts);
    const auto& file = std::get<FileIC>(ic);
    auto stem = std::filesystem::path(file.path);
    if (stem.extension() == ".json" || stem.extension() == ".f64") stem.replace_extension();
    Snapshot s = read_snapshot(stem);
    if (s.field.grid.d != grid.d || s.field.grid.n != grid.n || s.field.grid.L != grid.L)
        throw FileFormatError("file initial condition does not match the configured grid");
    s.field.grid.center = grid.center;
    return s.field;
}

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    std::vector<double> momentum;
    double energy = 0.0;
    double entropy = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double min_f = 0.0;
    std::vector<double> wsup;
};

// Momentum weights the seam node (index 0, at -L) with the grid center, the
// midpoint of its two periodic images at -L and +L.
inline DiagnosticsRecord diagnostics(const Field& f, double t, const std::vector<double>& q_list) {
    const Grid& g = f.grid;
    const double cell = g.cell();
    DiagnosticsRecord r;
    r.t = t;
    r.momentum.assign(g.d, 0.0);
    r.wsup.assign(q_list.size(), 0.0);
    double l2 = 0.0;
    r.min_f = f.size() ? f[0] : 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double v = f[i];
        auto ix = g.index(i);
        Point x = g.node(i);
        double r2 = 0.0;
        for (int k = 0; k < g.d; ++k) {
            r2 += x[k] * x[k];
            double xm = ix[k] == 0 ? g.center[k] : x[k];
            r.momentum[k] += xm * v;
        }
        r.mass += v;
        r.energy += r2 * v;
        if (v > 0.0) r.entropy += v * std::log(v);
        l2 += v * v;
        r.linf = std::max(r.linf, std::abs(v));
        r.min_f = std::min(r.min_f, v);
        double jv = std::sqrt(1.0 + r2);
        for (std::size_t q = 0; q < q_list.size(); ++q)
            r.wsup[q] = std::max(r.wsup[q], std::pow(jv, q_list[q]) * std::abs(v));
    }
    r.mass *= cell;
    r.energy *= cell;
    r.entropy *= cell;
    for (double& m : r.momentum) m *= cell;
    r.l2 = std::sqrt(l2 * cell);
    return r;
}

inline std::string diagnostics_csv_header(int d, const std::vector<double>& q_list) {
    std::string s = "t,mass";
    for (int k = 1; k <= d; ++k) s += ",p" + std::to_string(k);
    s += ",energy,entropy,l2,linf,min_f";
    for (double q : q_list) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ",wsup_%g", q);
        s += buf;
    }
    return s;
}

inline std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
    std::string s;
    char buf[64];
    auto put = [&](double x, bool first = false) {
        std::snprintf(buf, sizeof buf, first ? "%.17g" : ",%.17g", x);
        s += buf;
    };
    put(r.t, true);
    put(r.mass);
    for (double p : r.momentum) put(p);
    put(r.energy);
    put(r.entropy);
    put(r.l2);
    put(r.linf);
    put(r.min_f);
    for (double w : r.wsup) put(w);
    return s;
}

}  // namespace isoboltz
