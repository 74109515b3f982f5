#pragma once

// Closed-form propagation of sums of separable complex Gaussians. Every
// element of the bench (free space in the paraxial regime, the Gaussian
// apodized thin lens) maps a complex Gaussian to a complex Gaussian, so a
// field expressible as a few such branches has an exact analytic value at
// every plane. This is the reference the numerical engine is audited
// against; it handles finite pinhole waists, which the fringe-law formulas
// of analytic.hpp idealize away.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "waveopt/errors.hpp"
#include "waveopt/field.hpp"
#include "waveopt/grid.hpp"
#include "waveopt/optical_config.hpp"

namespace waveopt {

// One transverse axis of one branch: exp(-a u^2 + b u).
struct AxisGaussian {
    cdouble a{0.0, 0.0};
    cdouble b{0.0, 0.0};
};

struct GaussianBranch {
    cdouble amplitude{1.0, 0.0};
    AxisGaussian x, y;
};

using BranchField = std::vector<GaussianBranch>;

namespace gaussian_detail {

inline cdouble isqrt(cdouble z) { return std::sqrt(z); }

// Fresnel propagation of exp(-a u^2 + b u) over distance z along one axis.
// Returns the new axis parameters; multiplies `amp` by the per-axis factor
// sqrt(pi/(i lambda z a_hat)) exp(b^2/(4 a_hat)), a_hat = a - ik/(2z).
inline AxisGaussian propagate_axis(const AxisGaussian& ax, double z, double k, double lambda,
                                   cdouble& amp) {
    const cdouble i1(0.0, 1.0);
    const cdouble ahat = ax.a - i1 * k / (2.0 * z);
    AxisGaussian out;
    out.a = -i1 * k / (2.0 * z) + k * k / (4.0 * ahat * z * z);
    out.b = -i1 * k * ax.b / (2.0 * ahat * z);
    amp *= std::sqrt(std::numbers::pi / ahat) / std::sqrt(i1 * lambda * z) *
           std::exp(ax.b * ax.b / (4.0 * ahat));
    return out;
}

} // namespace gaussian_detail

// Exact paraxial free-space propagation over z > 0 (z = 0 is the identity).
inline GaussianBranch propagated(GaussianBranch g, double z, double k) {
    if (z < 0.0) throw geometry_error("gaussian reference: negative propagation distance");
    if (z == 0.0) return g;
    const double lambda = 2.0 * std::numbers::pi / k;
    g.x = gaussian_detail::propagate_axis(g.x, z, k, lambda, g.amplitude);
    g.y = gaussian_detail::propagate_axis(g.y, z, k, lambda, g.amplitude);
    g.amplitude *= std::exp(cdouble(0.0, k * z)); // plane-wave carrier, as in the numerical engine
    return g;
}

// Thin lens with Gaussian transmission exp(-r^2/(2 sigma^2)) and focal
// phase exp(-i k r^2 / (2 f)).
inline GaussianBranch through_lens(GaussianBranch g, double sigma, double f, double k) {
    const cdouble q = 1.0 / (2.0 * sigma * sigma) + cdouble(0.0, k / (2.0 * f));
    g.x.a += q;
    g.y.a += q;
    return g;
}

inline cdouble branch_value(const GaussianBranch& g, double x, double y) {
    return g.amplitude * std::exp(-g.x.a * x * x + g.x.b * x - g.y.a * y * y + g.y.b * y);
}

inline cdouble field_value(const BranchField& f, double x, double y) {
    cdouble s = 0.0;
    for (const auto& g : f) s += branch_value(g, x, y);
    return s;
}

// Exact total power of the branch sum, cross terms included:
// sum_ij amp_i conj(amp_j) * prod_axes integral exp(-(a_i+conj(a_j))u^2 + (b_i+conj(b_j))u) du.
inline double field_power(const BranchField& f) {
    auto axis_int = [](const AxisGaussian& gi, const AxisGaussian& gj) {
        const cdouble p = gi.a + std::conj(gj.a);
        const cdouble q = gi.b + std::conj(gj.b);
        if (!(p.real() > 0.0)) throw degenerate_error("gaussian reference: non-normalizable branch");
        return std::sqrt(std::numbers::pi / p) * std::exp(q * q / (4.0 * p));
    };
    cdouble total = 0.0;
    for (const auto& gi : f)
        for (const auto& gj : f)
            total += gi.amplitude * std::conj(gj.amplitude) * axis_int(gi.x, gj.x) * axis_int(gi.y, gj.y);
    return total.real();
}

inline void normalize(BranchField& f) {
    const double p = field_power(f);
    if (!(p > 0.0)) throw degenerate_error("gaussian reference: zero-power field");
    const double s = 1.0 / std::sqrt(p);
    for (auto& g : f) g.amplitude *= s;
}

inline BranchField propagated(BranchField f, double z, double k) {
    for (auto& g : f) g = propagated(g, z, k);
    return f;
}

inline BranchField through_lens(BranchField f, double sigma, double focal, double k) {
    for (auto& g : f) g = through_lens(g, sigma, focal, k);
    return f;
}

// The two-pinhole source: Gaussian sub-sources exp(-|r - r_i|^2/(2 w0^2))
// weighted by A and B, unit total power.
inline BranchField pinhole_pair_branches(const OpticalConfig& c) {
    require_valid(c);
    const double a = 1.0 / (2.0 * c.w0 * c.w0);
    auto make = [&](cdouble w, double x0) {
        GaussianBranch g;
        g.amplitude = w * std::exp(cdouble(-x0 * x0 * a, 0.0));
        g.x = {cdouble(a, 0.0), cdouble(2.0 * a * x0, 0.0)};
        g.y = {cdouble(a, 0.0), cdouble(0.0, 0.0)};
        return g;
    };
    BranchField f;
    if (std::norm(c.A) > 0.0) f.push_back(make(c.A, c.xA()));
    if (std::norm(c.B) > 0.0) f.push_back(make(c.B, c.xB()));
    normalize(f);
    return f;
}

// cos(2 pi x / period) under a Gaussian window of width window_sigma:
// two tilted-Gaussian branches with b = +-i 2 pi / period, unit power.
inline BranchField sinusoidal_branches(double period, double window_sigma) {
    if (!(period > 0.0) || !(window_sigma > 0.0))
        throw config_error("sinusoidal_branches: period and window must be positive");
    const double a = 1.0 / (2.0 * window_sigma * window_sigma);
    const double kappa = 2.0 * std::numbers::pi / period;
    BranchField f;
    for (int s : {+1, -1}) {
        GaussianBranch g;
        g.amplitude = 0.5;
        g.x = {cdouble(a, 0.0), cdouble(0.0, s * kappa)};
        g.y = {cdouble(a, 0.0), cdouble(0.0, 0.0)};
        f.push_back(g);
    }
    normalize(f);
    return f;
}

// Intensity along y = 0 on a grid's x axis, as a Profile.
inline Profile reference_cut(const BranchField& f, const GridSpec& g) {
    Profile p;
    p.x.reserve(g.nx);
    p.intensity.reserve(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        p.x.push_back(g.x(i));
        p.intensity.push_back(std::norm(field_value(f, g.x(i), 0.0)));
    }
    return p;
}

} // namespace waveopt
