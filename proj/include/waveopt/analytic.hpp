#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "waveopt/errors.hpp"
#include "waveopt/optical_config.hpp"

namespace waveopt {

struct DualityReport {
    double D = 0.0;
    double V = 0.0;
    double phi = 0.0;
    double duality_sum = 0.0;
};

// Which-way information available from the two path weights alone.
inline double distinguishability(cdouble A, cdouble B) {
    const double pa = std::norm(A), pb = std::norm(B);
    const double s = pa + pb;
    if (!(s > 0.0)) throw degenerate_error("distinguishability: both amplitudes are zero");
    return std::abs(pa - pb) / s;
}

// Fringe contrast and relative phase of the two-path superposition.
// phi is wrapped to (-pi, pi].
inline std::pair<double, double> visibility_phase(cdouble A, cdouble B) {
    const double pa = std::norm(A), pb = std::norm(B);
    const double s = pa + pb;
    if (!(s > 0.0)) throw degenerate_error("visibility_phase: both amplitudes are zero");
    const double V = (pa == pb) ? 1.0 : 2.0 * std::sqrt(pa * pb) / s;
    const double raw = std::arg(A) - std::arg(B);
    const double phi = std::atan2(std::sin(raw), std::cos(raw));
    return {V, phi};
}

inline DualityReport duality_check(cdouble A, cdouble B) {
    DualityReport r;
    r.D = distinguishability(A, B);
    std::tie(r.V, r.phi) = visibility_phase(A, B);
    r.duality_sum = r.D * r.D + r.V * r.V;
    return r;
}

// Complex Gaussian parameter of the post-lens Fresnel integral evaluated at
// observation distance P_prime_obs: 1/alpha = 2 (1/sigma^2 - i k epsilon),
// epsilon = 1/P + 1/P' - 1/f.
struct FresnelAlpha {
    double epsilon = 0.0;
    cdouble alpha{0.0, 0.0};
};

inline FresnelAlpha fresnel_alpha(const OpticalConfig& c, double P_prime_obs) {
    if (!(P_prime_obs > 0.0)) throw config_error("fresnel_alpha: observation distance must be positive");
    FresnelAlpha fa;
    fa.epsilon = 1.0 / c.P + 1.0 / P_prime_obs - 1.0 / c.f;
    const cdouble inv = 2.0 * (1.0 / (c.sigma * c.sigma) - cdouble(0.0, 1.0) * c.k() * fa.epsilon);
    fa.alpha = 1.0 / inv;
    return fa;
}

// P/(k sigma^2): the fringe-plane formulas below hold while this is small.
inline double focal_validity_ratio(const OpticalConfig& c) {
    return c.P / (c.k() * c.sigma * c.sigma);
}

namespace detail {

// integral of exp(-p u^2 + q u) du over the real line, Re p > 0
inline cdouble gauss_integral(cdouble p, cdouble q) {
    if (!(p.real() > 0.0)) throw degenerate_error("gauss_integral: divergent (Re p <= 0)");
    return std::sqrt(std::numbers::pi / p) * std::exp(q * q / (4.0 * p));
}

// Power of w_A e^{-g(u+aA)^2 ...} + w_B e^{-g(u+aB)^2 ...} over the plane,
// where u = X/L and the y factor is e^{-g (Y/L)^2} for both terms.
// g may be complex (amplitude exponent), weights complex.
inline double two_term_plane_power(cdouble g, double L, cdouble wA, cdouble wB, double aA, double aB) {
    const cdouble w[2] = {wA, wB};
    const double a[2] = {aA, aB};
    const cdouble gs = g + std::conj(g);
    // y axis (common, centered)
    const cdouble Iy = L * gauss_integral(gs, 0.0);
    cdouble total = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const cdouble gij = g * a[i] * a[i] + std::conj(g) * a[j] * a[j];
            const cdouble q = -2.0 * (g * a[i] + std::conj(g) * a[j]);
            const cdouble Ix = L * std::exp(-gij) * gauss_integral(gs, q);
            total += w[i] * std::conj(w[j]) * Ix * Iy;
        }
    return total.real();
}

} // namespace detail

// Field behind the lens at transverse point (Xx, Y) of the plane at distance
// P_prime_obs: the two-path sum of complex Gaussians, normalized to unit
// power over that plane.
inline cdouble post_lens_field(const OpticalConfig& c, double Xx, double Y, double P_prime_obs) {
    require_valid(c);
    const FresnelAlpha fa = fresnel_alpha(c, P_prime_obs);
    const double k = c.k();
    const cdouble g = k * k * fa.alpha;
    const double aA = c.xA() / c.P, aB = c.xB() / c.P;
    const double N = 1.0 / std::sqrt(detail::two_term_plane_power(g, P_prime_obs, c.A, c.B, aA, aB));
    const double u = Xx / P_prime_obs, v = Y / P_prime_obs;
    const cdouble tA = c.A * std::exp(-g * ((u + aA) * (u + aA) + v * v));
    const cdouble tB = c.B * std::exp(-g * ((u + aB) * (u + aB) + v * v));
    return N * (tA + tB);
}

inline double fringe_period_focal(const OpticalConfig& c) { return c.wavelength * c.f / c.d; }
inline double fringe_period_prelens(const OpticalConfig& c) { return c.wavelength * c.p / c.d; }

// Normalized fringe law in the back focal plane along the x axis:
// 1 + V cos(k d X / f + phi). Valid while focal_validity_ratio is small.
inline double focal_fringe_intensity(const OpticalConfig& c, double X) {
    const auto [V, phi] = visibility_phase(c.A, c.B);
    return 1.0 + V * std::cos(c.k() * c.d * X / c.f + phi);
}

// Same law in the plane a distance p before the lens (period lambda p / d).
inline double prelens_fringe_intensity(const OpticalConfig& c, double X) {
    const auto [V, phi] = visibility_phase(c.A, c.B);
    return 1.0 + V * std::cos(c.k() * c.d * X / c.p + phi);
}

// x positions of the focal fringe minima: X_n = (f/(kd)) (pi - phi + 2 pi n),
// the `count` of them nearest the axis, sorted.
inline std::vector<double> focal_minima(const OpticalConfig& c, int count) {
    if (count < 1) throw config_error("focal_minima: count must be at least 1");
    const auto [V, phi] = visibility_phase(c.A, c.B);
    const double scale = c.f / (c.k() * c.d);
    std::vector<double> xs;
    xs.reserve(count);
    for (int m = 0; m < count; ++m) {
        const int n = m - count / 2;
        xs.push_back(scale * (std::numbers::pi - phi + 2.0 * std::numbers::pi * n));
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

// Image-plane intensity (observation plane satisfying the lens equation):
// two Gaussian spots at X = -(P'/P) x_{A,B} with 1/e intensity half-width
// P'/(k sigma), weighted by |A|^2 and |B|^2; unit total power.
inline double image_intensity(const OpticalConfig& c, double Xx, double Y = 0.0) {
    require_valid(c);
    const FresnelAlpha fa = fresnel_alpha(c, c.P_prime);
    if (std::abs(fa.epsilon) * c.f > 1e-6)
        throw config_error("image_intensity: lens equation violated (1/P + 1/P' != 1/f)");
    const double k = c.k();
    const double g = k * k * c.sigma * c.sigma; // intensity exponent coefficient
    const double aA = c.xA() / c.P, aB = c.xB() / c.P;
    const double mass = (std::norm(c.A) + std::norm(c.B)) * std::numbers::pi * c.P_prime * c.P_prime / g;
    const double u = Xx / c.P_prime, v = Y / c.P_prime;
    const double tA = std::norm(c.A) * std::exp(-g * ((u + aA) * (u + aA) + v * v));
    const double tB = std::norm(c.B) * std::exp(-g * ((u + aB) * (u + aB) + v * v));
    return (tA + tB) / mass;
}

namespace detail {

// Unit-power focal-plane field at (x, y): envelope (exact complex alpha at
// P' = f) times the two-path phase bracket, whose zeros are exact.
inline cdouble focal_field(const OpticalConfig& c, double x, double y) {
    const double k = c.k();
    const cdouble gf = k * k * fresnel_alpha(c, c.f).alpha / (c.f * c.f);
    const double pa = std::norm(c.A), pb = std::norm(c.B);
    const auto [V, phi] = visibility_phase(c.A, c.B);
    const double g2 = 2.0 * gf.real();
    const double beta = k * c.d / c.f;
    const double Sy = std::sqrt(std::numbers::pi / g2);
    const double Sx = (pa + pb) * Sy + 2.0 * std::sqrt(pa * pb) * Sy *
                                           std::exp(-beta * beta / (4.0 * g2)) * std::cos(phi);
    const double N = 1.0 / std::sqrt(Sx * Sy);
    const cdouble env = std::exp(-gf * (x * x + y * y));
    const cdouble i1(0.0, 1.0);
    const cdouble bracket = c.A * std::exp(i1 * (k * c.d * x / (2.0 * c.f))) +
                            c.B * std::exp(-i1 * (k * c.d * x / (2.0 * c.f)));
    return N * env * bracket;
}

// Unit-power image-plane field: two Gaussian spot amplitudes (lens equation
// satisfied), cross term kept in the normalization.
inline cdouble image_field(const OpticalConfig& c, double Xx, double Y) {
    const double k = c.k();
    const cdouble g = k * k * c.sigma * c.sigma / 2.0; // amplitude exponent
    const double aA = c.xA() / c.P, aB = c.xB() / c.P;
    const double N = 1.0 / std::sqrt(two_term_plane_power(g, c.P_prime, c.A, c.B, aA, aB));
    const double u = Xx / c.P_prime, v = Y / c.P_prime;
    const cdouble tA = c.A * std::exp(-g * ((u + aA) * (u + aA) + v * v));
    const cdouble tB = c.B * std::exp(-g * ((u + aB) * (u + aB) + v * v));
    return N * (tA + tB);
}

} // namespace detail

// Image-plane intensity with a point scatterer of the given polarizability
// sitting at (x0x, x0y) in the back focal plane. The scattered wave reaches
// the image plane as a spherical wavelet from the focal plane, at distance
// R = P' - f, with amplitude proportional to the focal field at the
// scatterer. Total = |pol Psi(x0)|^2 + |Psi_img(X)|^2 + interference term.
inline double scattered_image_intensity(const OpticalConfig& c, double x0x, double x0y,
                                        cdouble polarizability, double Xx, double Y = 0.0) {
    require_valid(c);
    const double R = c.P_prime - c.f;
    if (std::abs(R) <= 1e-12 * std::max(c.f, c.P_prime))
        throw geometry_error("scattered_image_intensity: image plane coincides with focal plane (R = 0)");
    const FresnelAlpha fa = fresnel_alpha(c, c.P_prime);
    if (std::abs(fa.epsilon) * c.f > 1e-6)
        throw config_error("scattered_image_intensity: lens equation violated at the image plane");
    const cdouble psi0 = polarizability * detail::focal_field(c, x0x, x0y);
    const cdouble psi_img = detail::image_field(c, Xx, Y);
    const double k = c.k();
    const double dx0 = x0x - Xx, dy0 = x0y - Y;
    const cdouble phase = std::exp(cdouble(0.0, k * (dx0 * dx0 + dy0 * dy0) / (2.0 * R)));
    return std::norm(psi0) + std::norm(psi_img) + 2.0 * (std::conj(psi_img) * psi0 * phase).real();
}

// The bookkeeping mistake the wire-grid argument invites: pairing the
// perfect which-way knowledge of the image sub-ensemble (D' = 1) with the
// visibility of the full ensemble. The two numbers describe different
// ensembles, so their squares need not sum to 1.
struct MisuseReport {
    double D_prime = 1.0;
    double V = 0.0;
    double sum = 0.0;
    bool cross_ensemble = false; // true when D' and V come from different ensembles
    bool degenerate = false;     // one path closed: sub-ensemble equals full ensemble
};

inline MisuseReport duality_misuse_demo(cdouble A, cdouble B) {
    const double pa = std::norm(A), pb = std::norm(B);
    if (!(pa + pb > 0.0)) throw degenerate_error("duality_misuse_demo: both amplitudes are zero");
    MisuseReport r;
    if (pa == 0.0 || pb == 0.0) {
        r = {1.0, 0.0, 1.0, false, true};
        return r;
    }
    r.D_prime = 1.0;
    r.V = visibility_phase(A, B).first;
    r.sum = r.D_prime * r.D_prime + r.V * r.V;
    r.cross_ensemble = true;
    return r;
}

// Convenience: amplitudes with |A|/|B| = ratio and unit total weight.
inline std::pair<cdouble, cdouble> amplitudes_for_ratio(double ratio) {
    if (!(ratio > 0.0)) throw config_error("amplitude_ratio must be positive");
    const double n = std::sqrt(1.0 + ratio * ratio);
    return {cdouble(ratio / n, 0.0), cdouble(1.0 / n, 0.0)};
}

} // namespace waveopt
