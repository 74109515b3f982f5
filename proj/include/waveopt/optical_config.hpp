#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "waveopt/errors.hpp"
#include "waveopt/field.hpp"

namespace waveopt {

// Bench geometry: two pinholes separated by d on the optical axis' transverse
// line, a Gaussian-apodized thin lens of focal length f at distance P, an
// observation plane at distance P_prime behind the lens, and an auxiliary
// fringe plane p in front of the lens. Defaults satisfy every validity
// condition checked by config_validity() on the default grids.
struct OpticalConfig {
    double wavelength = 532e-9;
    double d = 200e-6;        // pinhole separation
    double sigma = 2e-3;      // lens Gaussian transmission width
    double f = 0.1;           // focal length
    double P = 0.2;           // pinholes -> lens
    double P_prime = 0.2;     // lens -> observation (image) plane
    double p = 0.15;          // pinholes -> pre-lens fringe plane
    double w0 = 10e-6;        // pinhole waist (numerical engine only)
    cdouble A{std::numbers::sqrt2 / 2.0, 0.0};
    cdouble B{std::numbers::sqrt2 / 2.0, 0.0};

    double k() const { return 2.0 * std::numbers::pi / wavelength; }
    double xA() const { return -d / 2.0; }
    double xB() const { return +d / 2.0; }
};

inline void require_valid(const OpticalConfig& c) {
    if (!(c.wavelength > 0.0)) throw config_error("wavelength must be positive");
    if (!(c.d > 0.0)) throw config_error("pinhole_separation must be positive");
    if (!(c.sigma > 0.0)) throw config_error("lens_sigma must be positive");
    if (!(c.f > 0.0)) throw config_error("focal_length must be positive");
    if (!(c.P > 0.0)) throw config_error("lens_to_pinholes must be positive");
    if (!(c.P_prime > 0.0)) throw config_error("lens_to_observation must be positive");
    if (!(c.p > 0.0)) throw config_error("prelens_distance must be positive");
    if (!(c.w0 > 0.0)) throw config_error("pinhole_waist must be positive");
    if (!(std::norm(c.A) + std::norm(c.B) > 0.0))
        throw config_error("amplitudes A and B must not both be zero");
}

// Focal-plane fringe formulas assume the lens aperture dominates the
// wavefront curvature: P/(k sigma^2) must stay small. Image-plane formulas
// assume the lens equation; spot separation is judged by k*sigma*d/P.
struct ConfigValidity {
    double focal_ratio = 0.0;      // P/(k sigma^2), "valid" below 0.05
    bool focal_valid = false;
    double epsilon_image = 0.0;    // 1/P + 1/P' - 1/f at the observation plane
    bool lens_equation_ok = false; // |epsilon| * f <= 1e-6
    double separation_ratio = 0.0; // k sigma d / P, spots separated above 5
    bool spots_separated = false;
};

inline ConfigValidity config_validity(const OpticalConfig& c) {
    ConfigValidity v;
    v.focal_ratio = c.P / (c.k() * c.sigma * c.sigma);
    v.focal_valid = v.focal_ratio < 0.05;
    v.epsilon_image = 1.0 / c.P + 1.0 / c.P_prime - 1.0 / c.f;
    v.lens_equation_ok = std::abs(v.epsilon_image) * c.f <= 1e-6;
    v.separation_ratio = c.k() * c.sigma * c.d / c.P;
    v.spots_separated = v.separation_ratio > 5.0;
    return v;
}

} // namespace waveopt
