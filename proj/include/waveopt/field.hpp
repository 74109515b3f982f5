#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "waveopt/errors.hpp"
#include "waveopt/grid.hpp"

namespace waveopt {

using cdouble = std::complex<double>;

enum class Plane { aperture, pre_lens, post_lens, focal, image, custom };

inline const char* plane_name(Plane p) {
    switch (p) {
        case Plane::aperture: return "aperture";
        case Plane::pre_lens: return "pre_lens";
        case Plane::post_lens: return "post_lens";
        case Plane::focal: return "focal";
        case Plane::image: return "image";
        case Plane::custom: return "custom";
    }
    return "custom";
}

// Scalar complex amplitude sampled on a grid. Values carry sqrt(power)/m,
// so sum(|v|^2) * dx * dy is the power crossing the plane.
struct ComplexField {
    GridSpec grid;
    std::vector<cdouble> values;
    double wavelength = 0.0;
    Plane plane = Plane::custom;

    ComplexField() = default;
    ComplexField(const GridSpec& g, double lambda, Plane p = Plane::custom)
        : grid(g), values(g.size()), wavelength(lambda), plane(p) {
        require_valid(grid);
        if (!(wavelength > 0.0)) throw config_error("field: wavelength must be positive");
    }

    double k() const { return 2.0 * std::numbers::pi / wavelength; }

    cdouble& at(int i, int j) { return values[grid.at(i, j)]; }
    const cdouble& at(int i, int j) const { return values[grid.at(i, j)]; }
};

struct IntensityMap {
    GridSpec grid;
    std::vector<double> values;

    double& at(int i, int j) { return values[grid.at(i, j)]; }
    const double& at(int i, int j) const { return values[grid.at(i, j)]; }
};

inline IntensityMap intensity_of(const ComplexField& f) {
    IntensityMap m{f.grid, std::vector<double>(f.values.size())};
    for (std::size_t n = 0; n < f.values.size(); ++n) m.values[n] = std::norm(f.values[n]);
    return m;
}

inline double total_power(const ComplexField& f) {
    double s = 0.0;
    for (const cdouble& v : f.values) s += std::norm(v);
    return s * f.grid.dx * f.grid.dy;
}

inline double total_power(const IntensityMap& m) {
    double s = 0.0;
    for (double v : m.values) s += v;
    return s * m.grid.dx * m.grid.dy;
}

inline ComplexField normalize_power(ComplexField f) {
    const double p = total_power(f);
    if (!(p > 0.0) || !std::isfinite(p))
        throw degenerate_error("normalize_power: field has zero (or non-finite) total power");
    const double s = 1.0 / std::sqrt(p);
    for (cdouble& v : f.values) v *= s;
    return f;
}

// 1-D slice along y = 0 (the row through the grid center).
struct Profile {
    std::vector<double> x;
    std::vector<double> intensity;
};

inline Profile axis_cut(const IntensityMap& m) {
    Profile p;
    p.x.reserve(m.grid.nx);
    p.intensity.reserve(m.grid.nx);
    const int j = m.grid.ny / 2;
    for (int i = 0; i < m.grid.nx; ++i) {
        p.x.push_back(m.grid.x(i));
        p.intensity.push_back(m.at(i, j));
    }
    return p;
}

// Reports whether the steepest quadratic phases in play stay below pi per
// sample at the grid edge: the thin-lens chirp k*x*dx/f and the free-space
// Fresnel chirp k*x*dx/z over the given distance. Report-only; propagators
// and element constructors enforce their own limits.
struct SamplingReport {
    bool pass = false;
    double worst_phase_step = 0.0;
    double lens_phase_step = 0.0;
    double propagation_phase_step = 0.0;
};

inline SamplingReport sampling_check(const GridSpec& g, double wavelength, double max_distance,
                                     double max_curvature_focal_length) {
    require_valid(g);
    if (!(wavelength > 0.0) || !(max_distance > 0.0) || !(max_curvature_focal_length > 0.0))
        throw config_error("sampling_check: wavelength, distance and focal length must be positive");
    const double k = 2.0 * std::numbers::pi / wavelength;
    const double ex = g.edge_x(), ey = g.edge_y();
    SamplingReport r;
    r.lens_phase_step = std::max(k * ex * g.dx, k * ey * g.dy) / max_curvature_focal_length;
    r.propagation_phase_step = std::max(k * ex * g.dx, k * ey * g.dy) / max_distance;
    r.worst_phase_step = std::max(r.lens_phase_step, r.propagation_phase_step);
    r.pass = r.worst_phase_step < std::numbers::pi;
    return r;
}

} // namespace waveopt
