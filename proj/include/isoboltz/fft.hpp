#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace isoboltz {

using cplx = std::complex<double>;

namespace detail {

// The FFTW planner is not thread safe.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

// Real <-> half-complex transform of a cube of side N in dimension d.
// Plans use FFTW_ESTIMATE so results do not depend on timing measurements.
class RealFFT {
public:
    RealFFT(int d, int N) : d_(d), N_(N) {
        real_size_ = 1;
        for (int k = 0; k < d; ++k) real_size_ *= N;
        half_size_ = real_size_ / N * (N / 2 + 1);
        real_.assign(real_size_, 0.0);
        spec_.assign(half_size_, cplx(0.0, 0.0));
        int dims[3] = {N, N, N};
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c(d, dims, real_.data(), reinterpret_cast<fftw_complex*>(spec_.data()),
                                 FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_c2r(d, dims, reinterpret_cast<fftw_complex*>(spec_.data()), real_.data(),
                                 FFTW_ESTIMATE);
    }
    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;
    ~RealFFT() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }

    int dim() const { return d_; }
    int side() const { return N_; }
    std::size_t real_size() const { return real_size_; }
    std::size_t half_size() const { return half_size_; }

    // real buffer -> spectrum buffer
    void forward(const std::vector<double>& in, std::vector<cplx>& out) {
        real_ = in;
        fftw_execute(fwd_);
        out = spec_;
    }
    // spectrum -> real, normalized so inverse(forward(x)) == x
    void inverse(const std::vector<cplx>& in, std::vector<double>& out) {
        spec_ = in;
        fftw_execute(inv_);
        const double scale = 1.0 / static_cast<double>(real_size_);
        out.resize(real_size_);
        for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
    }

private:
    int d_, N_;
    std::size_t real_size_, half_size_;
    std::vector<double> real_;
    std::vector<cplx> spec_;
    fftw_plan fwd_, inv_;
};

}  // namespace isoboltz
