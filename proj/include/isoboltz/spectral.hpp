#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "constants.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "specfun.hpp"

namespace isoboltz {

namespace detail {

inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / isoboltz::gamma(0.5 * d + 1.0);
}

// Average of |x|^mu over the ball of volume h^d centred at the origin.
inline double singular_cell_value(int d, double h, double mu) {
    double r0 = std::pow(std::pow(h, d) / unit_ball_volume(d), 1.0 / d);
    return d * std::pow(r0, mu) / (d + mu);
}

inline double power_kernel(double r, int d, double h, double mu) {
    return r == 0.0 ? singular_cell_value(d, h, mu) : std::pow(r, mu);
}

inline void check_mu(int d, double mu) {
    if (!(mu > -d && mu < 0.0)) throw DomainError("power kernel exponent must lie in (-d, 0)");
}

// Lattice sum sum_{k != 0} |x + a k|^{-p}.
class ImageSum {
public:
    ImageSum(int d, double a, double p, int K) : d_(d), a_(a), p_(p), K_(K) {
        if (d_ > 1) {
            // exterior of the cube [-1,1]^d: 2d/(p-d) * int_{[-1,1]^{d-1}} (1+|z|^2)^{-p/2} dz
            using boost::math::quadrature::gauss;
            double face;
            if (d_ == 2) {
                face = gauss<double, 30>::integrate(
                    [&](double z) { return std::pow(1.0 + z * z, -0.5 * p_); }, -1.0, 1.0);
            } else {
                face = gauss<double, 30>::integrate(
                    [&](double y) {
                        return gauss<double, 30>::integrate(
                            [&](double z) { return std::pow(1.0 + y * y + z * z, -0.5 * p_); },
                            -1.0, 1.0);
                    },
                    -1.0, 1.0);
            }
            double R = K_ + 0.5;
            tail_ = 2.0 * d_ / (p_ - d_) * face * std::pow(R, d_ - p_) * std::pow(a_, -p_);
        }
    }

    double operator()(const Point& x) const {
        if (d_ == 1) {
            double u = x[0] / a_;
            return std::pow(a_, -p_) * (hurwitz_zeta(p_, 1.0 + u) + hurwitz_zeta(p_, 1.0 - u));
        }
        double s = 0.0;
        int kz_lo = d_ == 3 ? -K_ : 0, kz_hi = d_ == 3 ? K_ : 0;
        for (int i = -K_; i <= K_; ++i)
            for (int j = -K_; j <= K_; ++j)
                for (int k = kz_lo; k <= kz_hi; ++k) {
                    if (i == 0 && j == 0 && k == 0) continue;
                    double y0 = x[0] + a_ * i, y1 = x[1] + a_ * j, y2 = d_ == 3 ? x[2] + a_ * k : 0.0;
                    s += std::pow(y0 * y0 + y1 * y1 + y2 * y2, -0.5 * p_);
                }
        return s + tail_;
    }

private:
    int d_;
    double a_, p_;
    int K_;
    double tail_ = 0.0;
};

}  // namespace detail

// Workspace for power-law convolutions and the fractional integral on a grid.
// The padded box has 2n nodes per axis (width 4L); dual grid xi = k pi / (2L),
// k in {-n, ..., n-1}. Not safe for concurrent use.
class SpectralPlan {
public:
    SpectralPlan(const Grid& grid, const ModelParams& params)
        : grid_(grid), params_(params), fft_(grid.d, 2 * grid.n) {
        grid.validate();
        params.validate();
        if (params.d != grid.d) throw DomainError("SpectralPlan: params.d differs from grid.d");
        frac_norm_ = frac_norm(params.d, params.s);
    }

    const Grid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    int padded_side() const { return 2 * grid_.n; }
    std::size_t padded_size() const { return fft_.real_size(); }
    std::size_t spectrum_size() const { return fft_.half_size(); }
    double frac_norm_value() const { return frac_norm_; }
    double max_abs_xi() const { return std::sqrt(static_cast<double>(grid_.d)) * std::numbers::pi / grid_.h(); }

    // Padded-box minimal-image coordinate of index j (relative, no center).
    double padded_offset(int j) const {
        const int N = padded_side();
        return (j < N / 2 ? j : j - N) * grid_.h();
    }

    // |xi|^2 at each half-spectrum entry.
    const std::vector<double>& xi_squared() {
        if (xi2_.empty()) {
            const int N = padded_side();
            const int H = N / 2 + 1;
            const double base = std::numbers::pi / (2.0 * grid_.L);
            xi2_.resize(spectrum_size());
            std::size_t idx = 0;
            auto freq = [&](int j) { return static_cast<double>(j < N / 2 ? j : j - N); };
            int n0 = grid_.d >= 2 ? N : 1, n1 = grid_.d >= 3 ? N : 1;
            for (int a = 0; a < n0; ++a)
                for (int b = 0; b < n1; ++b)
                    for (int c = 0; c < H; ++c) {
                        double ka = grid_.d >= 2 ? freq(a) : 0.0;
                        double kb = grid_.d >= 3 ? freq(b) : 0.0;
                        double kc = c;
                        xi2_[idx++] = base * base * (ka * ka + kb * kb + kc * kc);
                    }
        }
        return xi2_;
    }

    // m(xi) = -|xi|^{2s} / frac_norm, m(0) = 0.
    const std::vector<double>& multiplier() {
        if (mult_.empty()) {
            const auto& x2 = xi_squared();
            mult_.resize(x2.size());
            for (std::size_t i = 0; i < x2.size(); ++i)
                mult_[i] = -std::pow(x2[i], params_.s) / frac_norm_;
        }
        return mult_;
    }

    // -|xi|^2
    const std::vector<double>& laplacian() {
        if (lap_.empty()) {
            const auto& x2 = xi_squared();
            lap_.resize(x2.size());
            for (std::size_t i = 0; i < x2.size(); ++i) lap_[i] = -x2[i];
        }
        return lap_;
    }

    // h^d * FFT of the sampled kernel |x|^mu on the padded box.
    const std::vector<double>& kernel_spectrum(double mu) {
        detail::check_mu(grid_.d, mu);
        auto it = kernels_.find(mu);
        if (it != kernels_.end()) return it->second;
        std::vector<double> k(padded_size());
        fill_padded(k, [&](const Point& x) {
            double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            return detail::power_kernel(r, grid_.d, grid_.h(), mu);
        });
        return kernels_.emplace(mu, real_spectrum(k)).first->second;
    }

    // Multiplier of the free-space L_s for fields vanishing outside the box.
    const std::vector<double>& free_multiplier() {
        if (free_mult_.empty()) {
            const int d = grid_.d;
            const double p = d + 2.0 * params_.s;
            const int K = d == 2 ? 16 : 2;
            detail::ImageSum images(d, 4.0 * grid_.L, p, K);
            std::vector<double> k(padded_size());
            fill_padded(k, [&](const Point& x) { return images(x); });
            auto img = real_spectrum(k);
            const auto& m = multiplier();
            free_mult_.resize(m.size());
            for (std::size_t i = 0; i < m.size(); ++i) free_mult_[i] = m[i] - img[i];
        }
        return free_mult_;
    }

    void forward(const std::vector<double>& padded, std::vector<cplx>& spec) { fft_.forward(padded, spec); }
    void inverse(const std::vector<cplx>& spec, std::vector<double>& padded) { fft_.inverse(spec, padded); }

    // Zero extension into the padded box. With seam_split the nodes at -L are
    // shared half/half with their periodic images at +L.
    void embed(const Field& g, std::vector<double>& out, bool seam_split = false) const {
        const int n = grid_.n, N = 2 * n, d = grid_.d;
        out.assign(padded_size(), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) out[padded_index(grid_.index(i))] = g[i];
        if (!seam_split) return;
        for (int axis = 0; axis < d; ++axis) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                auto ix = unpack(j, N);
                if (ix[axis] != 0) continue;
                bool inside = true;
                for (int k = 0; k < d; ++k)
                    if (ix[k] > n) inside = false;
                if (!inside) continue;
                auto iy = ix;
                iy[axis] = n;
                double half = 0.5 * out[j];
                out[j] = half;
                out[padded_index(iy)] = half;
            }
        }
    }

    void restrict_to_box(const std::vector<double>& padded, Field& out) const {
        out = Field(grid_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = padded[padded_index(grid_.index(i))];
    }

    // Periodic closure: padded node j contributes to box node j mod n.
    void fold(const std::vector<double>& padded, Field& out) const {
        const int n = grid_.n, N = 2 * n;
        out = Field(grid_);
        for (std::size_t j = 0; j < padded.size(); ++j) {
            auto ix = unpack(j, N);
            for (int k = 0; k < grid_.d; ++k) ix[k] %= n;
            out[grid_.flat(ix)] += padded[j];
        }
    }

    Field power_convolve(const Field& g, double mu) {
        check_grid(g);
        const auto& K = kernel_spectrum(mu);
        std::vector<double> buf;
        std::vector<cplx> spec;
        embed(g, buf);
        forward(buf, spec);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= K[i];
        inverse(spec, buf);
        Field out;
        restrict_to_box(buf, out);
        return out;
    }

    // Free-space L_s of the zero extension of g, sampled on the box.
    Field frac_integral(const Field& g) {
        check_grid(g);
        const auto& m = free_multiplier();
        std::vector<double> buf;
        std::vector<cplx> spec;
        embed(g, buf);
        forward(buf, spec);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m[i];
        inverse(spec, buf);
        Field out;
        restrict_to_box(buf, out);
        return out;
    }

    // L_s of g extended 2L-periodically.
    Field frac_integral_periodic(const Field& g) {
        check_grid(g);
        const int n = grid_.n, N = 2 * n;
        const auto& m = multiplier();
        std::vector<double> buf(padded_size());
        for (std::size_t j = 0; j < buf.size(); ++j) {
            auto ix = unpack(j, N);
            for (int k = 0; k < grid_.d; ++k) ix[k] %= n;
            buf[j] = g[grid_.flat(ix)];
        }
        std::vector<cplx> spec;
        forward(buf, spec);
        for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m[i];
        inverse(spec, buf);
        Field out;
        restrict_to_box(buf, out);
        return out;
    }

    void check_grid(const Field& g) const {
        if (!(g.grid.d == grid_.d && g.grid.n == grid_.n && g.grid.L == grid_.L))
            throw DomainError("field does not live on the plan's grid");
    }

    std::size_t padded_index(const std::array<int, 3>& ix) const {
        const std::size_t N = 2 * grid_.n;
        std::size_t f = 0;
        for (int k = 0; k < grid_.d; ++k) f = f * N + ix[k];
        return f;
    }

private:
    std::array<int, 3> unpack(std::size_t j, int N) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int k = grid_.d - 1; k >= 0; --k) {
            ix[k] = static_cast<int>(j % N);
            j /= N;
        }
        return ix;
    }

    template <class Fn>
    void fill_padded(std::vector<double>& out, Fn&& fn) const {
        const int N = padded_side();
        for (std::size_t j = 0; j < out.size(); ++j) {
            auto ix = unpack(j, N);
            Point x{0.0, 0.0, 0.0};
            for (int k = 0; k < grid_.d; ++k) x[k] = padded_offset(ix[k]);
            out[j] = fn(x);
        }
    }

    std::vector<double> real_spectrum(const std::vector<double>& k) {
        std::vector<cplx> spec;
        forward(k, spec);
        std::vector<double> out(spec.size());
        const double cell = grid_.cell();
        for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real() * cell;
        return out;
    }

    Grid grid_;
    ModelParams params_;
    RealFFT fft_;
    double frac_norm_;
    std::vector<double> xi2_, mult_, lap_, free_mult_;
    std::map<double, std::vector<double>> kernels_;
};

// Direct summation with the same kernel samples as SpectralPlan::power_convolve.
inline std::vector<double> power_convolve_direct(const Grid& grid, const Field& g, double mu,
                                                 const std::vector<std::array<int, 3>>& nodes) {
    detail::check_mu(grid.d, mu);
    if (static_cast<double>(grid.size()) > 1e7) throw CostError("power_convolve_direct: n^d exceeds 1e7");
    if (!(g.grid.d == grid.d && g.grid.n == grid.n && g.grid.L == grid.L))
        throw DomainError("power_convolve_direct: field does not live on the grid");
    const double h = grid.h(), cell = grid.cell();
    std::vector<double> out;
    out.reserve(nodes.size());
    for (const auto& ix : nodes) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            auto jx = grid.index(j);
            double r2 = 0.0;
            for (int k = 0; k < grid.d; ++k) {
                double dx = (ix[k] - jx[k]) * h;
                r2 += dx * dx;
            }
            s += g[j] * detail::power_kernel(std::sqrt(r2), grid.d, h, mu);
        }
        out.push_back(s * cell);
    }
    return out;
}

}  // namespace isoboltz
