#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "waveopt/analytic.hpp"
#include "waveopt/errors.hpp"
#include "waveopt/field.hpp"
#include "waveopt/grid.hpp"
#include "waveopt/optical_config.hpp"

namespace waveopt {

// Thin passive element: pointwise complex transmission with |t| <= 1.
struct TransmissionMask {
    GridSpec grid;
    std::vector<cdouble> values;

    cdouble& at(int i, int j) { return values[grid.at(i, j)]; }
    const cdouble& at(int i, int j) const { return values[grid.at(i, j)]; }
};

struct WireGridSpec {
    std::vector<double> wire_centers; // x positions; wires run parallel to y
    double wire_width = 0.0;
};

// Two Gaussian sub-sources of waist w0 at (±d/2, 0), weighted A and B,
// normalized to unit power. w0 regularizes the ideal point pinholes; it must
// resolve on the grid (w0 > 3 max pitch) yet stay point-like (w0 < d/10).
inline ComplexField double_pinhole_field(const OpticalConfig& c, const GridSpec& grid) {
    require_valid(c);
    require_valid(grid);
    if (!(c.w0 < c.d / 10.0))
        throw sampling_error("double_pinhole_field: pinhole waist must be below d/10 to stay point-like");
    if (!(c.w0 > 3.0 * std::max(grid.dx, grid.dy)))
        throw sampling_error("double_pinhole_field: pinhole waist must exceed 3 grid pitches");
    ComplexField f(grid, c.wavelength, Plane::aperture);
    const double inv2w2 = 1.0 / (2.0 * c.w0 * c.w0);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double ra = (x - c.xA()) * (x - c.xA()) + y * y;
            const double rb = (x - c.xB()) * (x - c.xB()) + y * y;
            f.at(i, j) = c.A * std::exp(-ra * inv2w2) + c.B * std::exp(-rb * inv2w2);
        }
    }
    return normalize_power(std::move(f));
}

// Gaussian-apodized thin lens: exp(-r^2/(2 sigma^2)) exp(-i k r^2/(2 f)).
inline TransmissionMask gaussian_lens_mask(const OpticalConfig& c, const GridSpec& grid) {
    require_valid(c);
    require_valid(grid);
    const double k = c.k();
    const double step = std::max(k * grid.edge_x() * grid.dx, k * grid.edge_y() * grid.dy) / c.f;
    if (!(step < std::numbers::pi))
        throw sampling_error("gaussian_lens_mask: lens phase step exceeds pi per sample at the grid edge");
    TransmissionMask m{grid, std::vector<cdouble>(grid.size())};
    const double inv2s2 = 1.0 / (2.0 * c.sigma * c.sigma);
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double r2 = x * x + y * y;
            m.at(i, j) = std::exp(cdouble(-r2 * inv2s2, -k * r2 / (2.0 * c.f)));
        }
    }
    return m;
}

// Binary absorbing wires: transmission 0 where |x - center| < w/2, 1 elsewhere.
inline TransmissionMask wire_grid_mask(const WireGridSpec& spec, const GridSpec& grid) {
    require_valid(grid);
    if (!spec.wire_centers.empty()) {
        if (!(spec.wire_width > 0.0)) throw config_error("wire_grid_mask: wire width must be positive");
        if (!(spec.wire_width >= 3.0 * grid.dx))
            throw sampling_error("wire_grid_mask: wires must span at least 3 samples");
        std::vector<double> cs = spec.wire_centers;
        std::sort(cs.begin(), cs.end());
        for (std::size_t n = 1; n < cs.size(); ++n)
            if (cs[n] - cs[n - 1] < spec.wire_width)
                throw config_error("wire_grid_mask: wires overlap");
    }
    TransmissionMask m{grid, std::vector<cdouble>(grid.size(), cdouble(1.0, 0.0))};
    for (double c : spec.wire_centers) {
        for (int i = 0; i < grid.nx; ++i) {
            if (std::abs(grid.x(i) - c) < spec.wire_width / 2.0)
                for (int j = 0; j < grid.ny; ++j) m.at(i, j) = 0.0;
        }
    }
    return m;
}

// Wires centered on the `count` focal-plane fringe minima nearest the axis,
// with width = fill * fringe period.
inline WireGridSpec wire_grid_at_minima(const OpticalConfig& c, int count, double fill) {
    if (!(fill > 0.0 && fill < 1.0)) throw config_error("wire_fill must lie in (0, 1)");
    WireGridSpec s;
    s.wire_centers = focal_minima(c, count);
    s.wire_width = fill * fringe_period_focal(c);
    return s;
}

// Opaque screen pierced by two circular holes.
inline TransmissionMask two_hole_screen_mask(double c1x, double c1y, double c2x, double c2y,
                                             double radius, const GridSpec& grid) {
    require_valid(grid);
    if (!(radius > 0.0)) throw config_error("two_hole_screen_mask: radius must be positive");
    if (!(radius >= 3.0 * std::max(grid.dx, grid.dy)))
        throw sampling_error("two_hole_screen_mask: holes must span at least 3 samples");
    const double sep = std::hypot(c2x - c1x, c2y - c1y);
    if (!(sep > 2.0 * radius)) throw geometry_error("two_hole_screen_mask: holes overlap");
    TransmissionMask m{grid, std::vector<cdouble>(grid.size())};
    const double r2 = radius * radius;
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double d1 = (x - c1x) * (x - c1x) + (y - c1y) * (y - c1y);
            const double d2 = (x - c2x) * (x - c2x) + (y - c2y) * (y - c2y);
            m.at(i, j) = (d1 < r2 || d2 < r2) ? 1.0 : 0.0;
        }
    }
    return m;
}

// cos(2 pi x / period) under a Gaussian window (width window_sigma), unit
// power. The window must hold at least 10 periods (taken as ±2 sigma) and
// the period at least 8 samples.
inline ComplexField sinusoidal_object_field(double period, double window_sigma, double wavelength,
                                            const GridSpec& grid) {
    require_valid(grid);
    if (!(period > 0.0) || !(window_sigma > 0.0))
        throw config_error("sinusoidal_object_field: period and window must be positive");
    if (!(period >= 8.0 * grid.dx))
        throw sampling_error("sinusoidal_object_field: period must span at least 8 samples");
    if (!(4.0 * window_sigma / period >= 10.0))
        throw sampling_error("sinusoidal_object_field: window must hold at least 10 periods");
    ComplexField f(grid, wavelength, Plane::aperture);
    const double inv2s2 = 1.0 / (2.0 * window_sigma * window_sigma);
    const double kappa = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < grid.ny; ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            f.at(i, j) = std::cos(kappa * x) * std::exp(-(x * x + y * y) * inv2s2);
        }
    }
    return normalize_power(std::move(f));
}

} // namespace waveopt
