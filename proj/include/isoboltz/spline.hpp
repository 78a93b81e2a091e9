#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "grid.hpp"

namespace isoboltz {

namespace detail {

inline double bspline5(double t) {
    t = std::abs(t);
    if (t < 1.0) {
        double t2 = t * t;
        return (66.0 + t2 * (-60.0 + t2 * (30.0 - 10.0 * t))) / 120.0;
    }
    if (t < 2.0) return (51.0 + t * (75.0 + t * (-210.0 + t * (150.0 + t * (-45.0 + 5.0 * t))))) / 120.0;
    if (t < 3.0) {
        double u = 3.0 - t;
        double u2 = u * u;
        return u2 * u2 * u / 120.0;
    }
    return 0.0;
}

// Solves the symmetric pentadiagonal Toeplitz system with rows (1, 26, 66, 26, 1)/120
// in place (banded Cholesky, recomputed per call).
inline void bspline5_prefilter(std::vector<double>& x) {
    const std::size_t m = x.size();
    std::vector<double> l0(m), l1(m), l2(m);  // diagonal, first and second subdiagonals of L
    const double a0 = 66.0 / 120.0, a1 = 26.0 / 120.0, a2 = 1.0 / 120.0;
    for (std::size_t i = 0; i < m; ++i) {
        double sub2 = i >= 2 ? a2 / l0[i - 2] : 0.0;
        double sub1 = i >= 1 ? (a1 - (i >= 2 ? sub2 * l1[i - 1] : 0.0)) / l0[i - 1] : 0.0;
        l2[i] = sub2;
        l1[i] = sub1;
        double diag = a0 - sub1 * sub1 - sub2 * sub2;
        l0[i] = std::sqrt(diag);
    }
    for (std::size_t i = 0; i < m; ++i) {
        double v = x[i];
        if (i >= 1) v -= l1[i] * x[i - 1];
        if (i >= 2) v -= l2[i] * x[i - 2];
        x[i] = v / l0[i];
    }
    for (std::size_t k = m; k-- > 0;) {
        double v = x[k];
        if (k + 1 < m) v -= l1[k + 1] * x[k + 1];
        if (k + 2 < m) v -= l2[k + 2] * x[k + 2];
        x[k] = v / l0[k];
    }
}

}  // namespace detail

// C^4 quintic B-spline interpolant of a field extended by zero. Nodes within
// three cells of the box are interpolated too, so the interpolant vanishes
// smoothly beyond them.
class SplineField {
public:
    static constexpr int margin = 3;

    SplineField() = default;
    explicit SplineField(const Field& f) : grid_(f.grid) {
        const int d = grid_.d, n = grid_.n;
        m_ = n + 2 * margin;
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) total *= m_;
        c_.assign(total, 0.0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto ix = grid_.index(i);
            std::size_t e = 0;
            for (int k = 0; k < d; ++k) e = e * m_ + (ix[k] + margin);
            c_[e] = f[i];
        }
        std::vector<double> line(m_);
        std::size_t stride = 1;
        for (int axis = d - 1; axis >= 0; --axis) {
            for (std::size_t base = 0; base < total; ++base) {
                if ((base / stride) % m_ != 0) continue;
                for (int j = 0; j < m_; ++j) line[j] = c_[base + j * stride];
                detail::bspline5_prefilter(line);
                for (int j = 0; j < m_; ++j) c_[base + j * stride] = line[j];
            }
            stride *= m_;
        }
    }

    const Grid& grid() const { return grid_; }

    double operator()(const Point& v) const {
        const int d = grid_.d;
        const double h = grid_.h();
        std::array<int, 3> first{};
        std::array<std::array<double, 6>, 3> w{};
        for (int k = 0; k < d; ++k) {
            double u = (v[k] - (grid_.center[k] - grid_.L)) / h + margin;
            int i0 = static_cast<int>(std::floor(u)) - 2;
            first[k] = i0;
            for (int j = 0; j < 6; ++j) w[k][j] = detail::bspline5(u - (i0 + j));
            if (i0 + 5 < 0 || i0 >= m_) return 0.0;
        }
        double s = 0.0;
        if (d == 1) {
            for (int a = 0; a < 6; ++a) s += w[0][a] * coef(first[0] + a);
        } else if (d == 2) {
            for (int a = 0; a < 6; ++a) {
                int ia = first[0] + a;
                if (ia < 0 || ia >= m_) continue;
                double r = 0.0;
                for (int b = 0; b < 6; ++b) r += w[1][b] * coef(ia, first[1] + b);
                s += w[0][a] * r;
            }
        } else {
            for (int a = 0; a < 6; ++a) {
                int ia = first[0] + a;
                if (ia < 0 || ia >= m_) continue;
                double r = 0.0;
                for (int b = 0; b < 6; ++b) {
                    int ib = first[1] + b;
                    if (ib < 0 || ib >= m_) continue;
                    double q = 0.0;
                    for (int c = 0; c < 6; ++c) q += w[2][c] * coef(ia, ib, first[2] + c);
                    r += w[1][b] * q;
                }
                s += w[0][a] * r;
            }
        }
        return s;
    }

private:
    double coef(int a) const { return a < 0 || a >= m_ ? 0.0 : c_[a]; }
    double coef(int a, int b) const {
        return b < 0 || b >= m_ ? 0.0 : c_[static_cast<std::size_t>(a) * m_ + b];
    }
    double coef(int a, int b, int c) const {
        return c < 0 || c >= m_ ? 0.0 : c_[(static_cast<std::size_t>(a) * m_ + b) * m_ + c];
    }

    Grid grid_;
    int m_ = 0;
    std::vector<double> c_;
};

}  // namespace isoboltz
