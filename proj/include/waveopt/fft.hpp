#pragma once

#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "waveopt/errors.hpp"

namespace waveopt::fft {

// FFTW's planner is not thread-safe; executing a plan is. Every plan
// create/destroy goes through this mutex.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline constexpr int forward = FFTW_FORWARD;
inline constexpr int backward = FFTW_BACKWARD;

namespace detail {

struct PlanGuard {
    fftw_plan plan = nullptr;
    ~PlanGuard() {
        if (plan) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

} // namespace detail

// In-place 2-D DFT over row-major data (ny rows of nx). FFTW sign
// conventions; the backward transform is scaled by 1/(nx*ny) so that
// backward(forward(x)) == x.
inline void dft2(std::vector<std::complex<double>>& data, int nx, int ny, int sign) {
    if (data.size() != static_cast<std::size_t>(nx) * ny)
        throw config_error("dft2: data size does not match nx*ny");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    detail::PlanGuard g;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        g.plan = fftw_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE);
    }
    if (!g.plan) throw error("dft2: FFTW planning failed");
    fftw_execute(g.plan);
    if (sign == backward) {
        const double s = 1.0 / (static_cast<double>(nx) * ny);
        for (auto& v : data) v *= s;
    }
}

// In-place batched 1-D DFTs: `count` contiguous rows of length n.
inline void dft_rows(std::complex<double>* data, int n, int count, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    detail::PlanGuard g;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        g.plan = fftw_plan_many_dft(1, &n, count, p, nullptr, 1, n, p, nullptr, 1, n, sign,
                                    FFTW_ESTIMATE);
    }
    if (!g.plan) throw error("dft_rows: FFTW planning failed");
    fftw_execute(g.plan);
    if (sign == backward) {
        const double s = 1.0 / n;
        const std::size_t total = static_cast<std::size_t>(n) * count;
        for (std::size_t i = 0; i < total; ++i) data[i] *= s;
    }
}

// Angular spatial frequency (rad/m) of DFT bin i for an n-point transform
// with sample pitch d, in natural (unshifted) bin order.
inline double bin_wavenumber(int i, int n, double d) {
    const int ii = (i < (n + 1) / 2) ? i : i - n;
    return 2.0 * std::numbers::pi * ii / (n * d);
}

} // namespace waveopt::fft
