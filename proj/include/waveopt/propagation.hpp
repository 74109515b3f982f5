#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "waveopt/elements.hpp"
#include "waveopt/errors.hpp"
#include "waveopt/fft.hpp"
#include "waveopt/field.hpp"
#include "waveopt/grid.hpp"

namespace waveopt {

struct PropagationAudit {
    double truncated_power_fraction = 0.0; // spectral power removed by the band limit
};

// Frequency-domain scalar propagation over distance z >= 0 with the transfer
// function exp(i z sqrt(k^2 - kx^2 - ky^2)). Evanescent components are
// dropped, and the spectrum is truncated beyond the per-axis aliasing-safe
// cone (the wider the hop, the narrower the cone), so wrap-around ghosts
// cannot re-enter the window. Truncated spectral power is reported.
inline ComplexField angular_spectrum(const ComplexField& f, double z,
                                     PropagationAudit* audit = nullptr) {
    if (z < 0.0) throw geometry_error("angular_spectrum: negative distance (no back-propagation)");
    if (audit) *audit = {};
    if (z == 0.0) return f;
    const GridSpec& g = f.grid;
    const double k = f.k();
    ComplexField out = f;
    out.plane = Plane::custom;
    fft::dft2(out.values, g.nx, g.ny, fft::forward);

    // per-axis band limit (in angular frequency), from the aliasing-safe
    // bound on the transfer-function phase gradient
    const double dnx = 1.0 / g.extent_x(), dny = 1.0 / g.extent_y();
    const double klim_x =
        2.0 * std::numbers::pi / (f.wavelength * std::sqrt(std::pow(2.0 * dnx * z, 2) + 1.0));
    const double klim_y =
        2.0 * std::numbers::pi / (f.wavelength * std::sqrt(std::pow(2.0 * dny * z, 2) + 1.0));

    double kept = 0.0, cut = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double ky = fft::bin_wavenumber(j, g.ny, g.dy);
        for (int i = 0; i < g.nx; ++i) {
            const double kx = fft::bin_wavenumber(i, g.nx, g.dx);
            cdouble& v = out.values[g.at(i, j)];
            const double kt2 = kx * kx + ky * ky;
            const double pw = std::norm(v);
            if (kt2 >= k * k || std::abs(kx) > klim_x || std::abs(ky) > klim_y) {
                cut += pw;
                v = 0.0;
            } else {
                kept += pw;
                v *= std::exp(cdouble(0.0, z * std::sqrt(k * k - kt2)));
            }
        }
    }
    if (audit && kept + cut > 0.0) audit->truncated_power_fraction = cut / (kept + cut);
    fft::dft2(out.values, g.nx, g.ny, fft::backward);
    return out;
}

namespace detail {

inline int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}

// Centered chirp transform: out[kk] = sum_m in[m] exp(-i theta (kk - K/2)(m - M/2)),
// evaluated for all kk in [0, K) by Bluestein's substitution
// kappa*mu = (kappa^2 + mu^2 - (kappa - mu)^2)/2, which turns the sum into a
// circular convolution with the chirp exp(+i theta n^2 / 2).
inline std::vector<cdouble> chirp_dft_centered(const cdouble* in, int M, int K, double theta) {
    const int L = next_pow2(M + K);
    std::vector<cdouble> a(L, cdouble(0.0, 0.0)), b(L, cdouble(0.0, 0.0));
    for (int m = 0; m < M; ++m) {
        const double mu = m - M / 2;
        a[m] = in[m] * std::exp(cdouble(0.0, -theta * mu * mu / 2.0));
    }
    const int nmax = (M + K) / 2;
    for (int n = 0; n <= nmax && n < L; ++n) {
        const cdouble c = std::exp(cdouble(0.0, theta * double(n) * double(n) / 2.0));
        b[n] = c;
        if (n > 0) b[L - n] = c; // chirp is even in n
    }
    fft::dft_rows(a.data(), L, 1, fft::forward);
    fft::dft_rows(b.data(), L, 1, fft::forward);
    for (int n = 0; n < L; ++n) a[n] *= b[n];
    fft::dft_rows(a.data(), L, 1, fft::backward);
    std::vector<cdouble> out(K);
    for (int kk = 0; kk < K; ++kk) {
        const double kap = kk - K / 2;
        // convolution slot p satisfies p - m = kappa - mu, i.e. p = kappa + M/2
        const int idx = ((kk - K / 2 + M / 2) % L + L) % L;
        out[kk] = a[idx] * std::exp(cdouble(0.0, -theta * kap * kap / 2.0));
    }
    return out;
}

// Apply chirp_dft_centered along the contiguous axis of each of `rows` rows,
// batching the three length-L transforms across rows.
inline std::vector<cdouble> chirp_dft_rows(const std::vector<cdouble>& in, int M, int rows, int K,
                                           double theta) {
    const int L = next_pow2(M + K);
    std::vector<cdouble> a(static_cast<std::size_t>(L) * rows, cdouble(0.0, 0.0));
    std::vector<cdouble> b(L, cdouble(0.0, 0.0));
    std::vector<cdouble> in_chirp(M), out_chirp(K);
    for (int m = 0; m < M; ++m) {
        const double mu = m - M / 2;
        in_chirp[m] = std::exp(cdouble(0.0, -theta * mu * mu / 2.0));
    }
    for (int kk = 0; kk < K; ++kk) {
        const double kap = kk - K / 2;
        out_chirp[kk] = std::exp(cdouble(0.0, -theta * kap * kap / 2.0));
    }
    const int nmax = (M + K) / 2;
    for (int n = 0; n <= nmax && n < L; ++n) {
        const cdouble c = std::exp(cdouble(0.0, theta * double(n) * double(n) / 2.0));
        b[n] = c;
        if (n > 0) b[L - n] = c;
    }
    fft::dft_rows(b.data(), L, 1, fft::forward);
    for (int r = 0; r < rows; ++r) {
        const cdouble* src = in.data() + static_cast<std::size_t>(r) * M;
        cdouble* dst = a.data() + static_cast<std::size_t>(r) * L;
        for (int m = 0; m < M; ++m) dst[m] = src[m] * in_chirp[m];
    }
    fft::dft_rows(a.data(), L, rows, fft::forward);
    for (int r = 0; r < rows; ++r) {
        cdouble* row = a.data() + static_cast<std::size_t>(r) * L;
        for (int n = 0; n < L; ++n) row[n] *= b[n];
    }
    fft::dft_rows(a.data(), L, rows, fft::backward);
    std::vector<cdouble> out(static_cast<std::size_t>(K) * rows);
    for (int r = 0; r < rows; ++r) {
        const cdouble* row = a.data() + static_cast<std::size_t>(r) * L;
        cdouble* dst = out.data() + static_cast<std::size_t>(r) * K;
        for (int kk = 0; kk < K; ++kk) {
            const int idx = ((kk - K / 2 + M / 2) % L + L) % L;
            dst[kk] = row[idx] * out_chirp[kk];
        }
    }
    return out;
}

inline std::vector<cdouble> transpose(const std::vector<cdouble>& in, int ncols, int nrows) {
    std::vector<cdouble> out(in.size());
    for (int r = 0; r < nrows; ++r)
        for (int c = 0; c < ncols; ++c)
            out[static_cast<std::size_t>(c) * nrows + r] = in[static_cast<std::size_t>(r) * ncols + c];
    return out;
}

} // namespace detail

// Single-step Fresnel propagation onto an arbitrary output grid (pitch and
// extent free of the input grid's), via the chirp transform. Guards: the
// input and output Fresnel chirps must stay below pi per sample at the grid
// edges, and the output window must fit inside one discretization replica.
inline ComplexField fresnel_scaled(const ComplexField& f, double z, const GridSpec& out_grid) {
    if (!(z > 0.0)) throw geometry_error("fresnel_scaled: distance must be positive");
    require_valid(out_grid);
    const GridSpec& gi = f.grid;
    const double k = f.k();
    const double in_step = std::max(k * gi.edge_x() * gi.dx, k * gi.edge_y() * gi.dy) / z;
    if (!(in_step < std::numbers::pi))
        throw sampling_error("fresnel_scaled: input grid undersamples the propagation chirp");
    const double out_step =
        std::max(k * out_grid.edge_x() * out_grid.dx, k * out_grid.edge_y() * out_grid.dy) / z;
    if (!(out_step < std::numbers::pi))
        throw sampling_error("fresnel_scaled: output grid undersamples the propagation chirp");
    const double replica_x = f.wavelength * z / gi.dx, replica_y = f.wavelength * z / gi.dy;
    if (!(out_grid.extent_x() < replica_x && out_grid.extent_y() < replica_y))
        throw sampling_error("fresnel_scaled: output window exceeds the aliasing-free extent");

    const double dcx = out_grid.cx - gi.cx, dcy = out_grid.cy - gi.cy;

    // centered-coordinate input, with its quadratic and the center-offset
    // linear phases applied
    std::vector<cdouble> work(gi.size());
    for (int j = 0; j < gi.ny; ++j) {
        const double yc = (j - gi.ny / 2) * gi.dy;
        for (int i = 0; i < gi.nx; ++i) {
            const double xc = (i - gi.nx / 2) * gi.dx;
            const double ph = k * ((xc * xc + yc * yc) / (2.0 * z) - (xc * dcx + yc * dcy) / z);
            work[gi.at(i, j)] = f.values[gi.at(i, j)] * std::exp(cdouble(0.0, ph));
        }
    }

    const double theta_x = k * out_grid.dx * gi.dx / z;
    const double theta_y = k * out_grid.dy * gi.dy / z;
    // rows: x transform; then transpose, y transform, transpose back
    std::vector<cdouble> tx = detail::chirp_dft_rows(work, gi.nx, gi.ny, out_grid.nx, theta_x);
    std::vector<cdouble> txt = detail::transpose(tx, out_grid.nx, gi.ny);
    std::vector<cdouble> ty = detail::chirp_dft_rows(txt, gi.ny, out_grid.nx, out_grid.ny, theta_y);
    std::vector<cdouble> res = detail::transpose(ty, out_grid.ny, out_grid.nx);

    ComplexField out(out_grid, f.wavelength, Plane::custom);
    const cdouble pref = std::exp(cdouble(0.0, k * (z + (dcx * dcx + dcy * dcy) / (2.0 * z)))) /
                         (cdouble(0.0, 1.0) * f.wavelength * z) * (gi.dx * gi.dy);
    for (int j = 0; j < out_grid.ny; ++j) {
        const double Yc = (j - out_grid.ny / 2) * out_grid.dy;
        for (int i = 0; i < out_grid.nx; ++i) {
            const double Xc = (i - out_grid.nx / 2) * out_grid.dx;
            const double ph = k * ((Xc * Xc + Yc * Yc) / (2.0 * z) + (Xc * dcx + Yc * dcy) / z);
            out.values[out_grid.at(i, j)] =
                res[out_grid.at(i, j)] * pref * std::exp(cdouble(0.0, ph));
        }
    }
    return out;
}

inline ComplexField apply_mask(const ComplexField& f, const TransmissionMask& m) {
    if (!(f.grid == m.grid)) throw config_error("apply_mask: field and mask grids differ");
    ComplexField out = f;
    for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] *= m.values[n];
    return out;
}

// ----- declarative chain executor -------------------------------------------

struct Propagate {
    double distance = 0.0;
    enum class Method { angular_spectrum, fresnel_scaled } method = Method::angular_spectrum;
    std::optional<GridSpec> output_grid; // required for fresnel_scaled
};

struct Element {
    TransmissionMask mask;
    std::string name = "element";
};

struct Record {
    std::string label;
    Plane plane = Plane::custom;
};

using PlanStep = std::variant<Propagate, Element, Record>;

struct StepAudit {
    int index = 0;
    std::string description;
    double power_before = 0.0;
    double power_after = 0.0;
    double attributed_loss = 0.0; // mask absorption or band-limit truncation
};

struct ChainResult {
    std::vector<std::pair<std::string, ComplexField>> records;
    std::vector<StepAudit> audit;
};

namespace detail {

[[noreturn]] inline void rethrow_with_step(int index, const std::string& desc) {
    const std::string tag = "chain step " + std::to_string(index) + " (" + desc + "): ";
    try {
        throw;
    } catch (const sampling_error& e) {
        throw sampling_error(tag + e.what());
    } catch (const geometry_error& e) {
        throw geometry_error(tag + e.what());
    } catch (const config_error& e) {
        throw config_error(tag + e.what());
    } catch (const error& e) {
        throw error(tag + e.what());
    }
}

} // namespace detail

// Executes propagate/element/record steps in order. Power along the chain
// may only decrease; each decrease is attributed to its step (mask
// absorption, band-limit truncation, or window capture of a re-gridding hop).
inline ChainResult run_chain(ComplexField field, const std::vector<PlanStep>& plan) {
    ChainResult result;
    int idx = 0;
    for (const auto& step : plan) {
        StepAudit audit;
        audit.index = idx;
        audit.power_before = total_power(field);
        try {
            if (const auto* pr = std::get_if<Propagate>(&step)) {
                if (pr->method == Propagate::Method::angular_spectrum) {
                    audit.description = "propagate " + std::to_string(pr->distance) + " m (angular spectrum)";
                    PropagationAudit pa;
                    field = angular_spectrum(field, pr->distance, &pa);
                    audit.attributed_loss = pa.truncated_power_fraction * audit.power_before;
                } else {
                    if (!pr->output_grid)
                        throw config_error("fresnel_scaled step requires an output grid");
                    audit.description = "propagate " + std::to_string(pr->distance) + " m (scaled Fresnel)";
                    field = fresnel_scaled(field, pr->distance, *pr->output_grid);
                    audit.attributed_loss = 0.0; // set from the measured difference below
                }
            } else if (const auto* el = std::get_if<Element>(&step)) {
                audit.description = "element: " + el->name;
                field = apply_mask(field, el->mask);
            } else {
                const auto& rec = std::get<Record>(step);
                audit.description = "record: " + rec.label;
                ComplexField snapshot = field;
                snapshot.plane = rec.plane;
                result.records.emplace_back(rec.label, std::move(snapshot));
            }
        } catch (...) {
            detail::rethrow_with_step(idx, audit.description.empty() ? "step" : audit.description);
        }
        audit.power_after = total_power(field);
        if (audit.power_after > audit.power_before * (1.0 + 1e-6))
            throw accounting_error("run_chain: power increased at step " + std::to_string(idx));
        if (std::holds_alternative<Element>(step) ||
            (std::holds_alternative<Propagate>(step) &&
             std::get<Propagate>(step).method == Propagate::Method::fresnel_scaled))
            audit.attributed_loss = std::max(0.0, audit.power_before - audit.power_after);
        result.audit.push_back(std::move(audit));
        ++idx;
    }
    return result;
}

} // namespace waveopt
