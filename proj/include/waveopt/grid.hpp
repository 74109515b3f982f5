#pragma once

#include <cmath>
#include <cstddef>

#include "waveopt/errors.hpp"

namespace waveopt {

// Uniform 2-D sampling lattice. Sample (nx/2, ny/2) sits at the physical
// center (cx, cy); all coordinates are meters.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    double x(int i) const { return cx + (i - nx / 2) * dx; }
    double y(int j) const { return cy + (j - ny / 2) * dy; }

    int ix(double X) const { return nx / 2 + static_cast<int>(std::lround((X - cx) / dx)); }
    int iy(double Y) const { return ny / 2 + static_cast<int>(std::lround((Y - cy) / dy)); }

    bool contains(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }

    double extent_x() const { return nx * dx; }
    double extent_y() const { return ny * dy; }

    // Largest |x| (resp. |y|) of any sample; the steepest point of any
    // quadratic phase lives there.
    double edge_x() const { return std::max(std::abs(x(0)), std::abs(x(nx - 1))); }
    double edge_y() const { return std::max(std::abs(y(0)), std::abs(y(ny - 1))); }

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t at(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }

    bool operator==(const GridSpec&) const = default;
};

inline void require_valid(const GridSpec& g) {
    if (g.nx < 2 || g.ny < 2) throw config_error("grid: nx and ny must both be at least 2");
    if (!(g.dx > 0.0) || !(g.dy > 0.0)) throw config_error("grid: dx and dy must both be positive");
}

// Convenience: square grid of n x n samples with pitch d, centered on the origin.
inline GridSpec centered_grid(int n, double pitch) {
    GridSpec g{n, n, pitch, pitch, 0.0, 0.0};
    require_valid(g);
    return g;
}

} // namespace waveopt
