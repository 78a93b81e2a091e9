#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace isoboltz {

// mt19937_64 with hand-rolled transforms so streams are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Piecewise-constant density on grid cells, mixing |f| and |f|^{1/2}.
class CellSampler {
public:
    CellSampler() = default;
    explicit CellSampler(const Field& f) : grid_(f.grid) {
        const std::size_t m = f.size();
        std::vector<double> w1(m), w2(m);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            w1[i] = std::abs(f[i]);
            w2[i] = std::sqrt(w1[i]);
            s1 += w1[i];
            s2 += w2[i];
        }
        empty_ = !(s1 > 0.0);
        if (empty_) return;
        prob_.resize(m);
        cdf_.resize(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            prob_[i] = 0.5 * w1[i] / s1 + 0.5 * w2[i] / s2;
            acc += prob_[i];
            cdf_[i] = acc;
        }
        for (double& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    bool empty() const { return empty_; }

    // Draws a point and returns its density.
    double sample(Rng& rng, Point& x) const {
        double u = rng.uniform();
        std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
        if (i >= cdf_.size()) i = cdf_.size() - 1;
        x = grid_.node(i);
        const double h = grid_.h();
        for (int k = 0; k < grid_.d; ++k) x[k] += (rng.uniform() - 0.5) * h;
        return prob_[i] / grid_.cell();
    }

private:
    Grid grid_;
    std::vector<double> prob_, cdf_;
    bool empty_ = true;
};

}  // namespace isoboltz
