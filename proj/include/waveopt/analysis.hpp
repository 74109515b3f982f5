#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "waveopt/errors.hpp"
#include "waveopt/field.hpp"

namespace waveopt {

struct FringeMetrics {
    double V_measured = 0.0;
    double phi_measured = 0.0;
    double period_measured = 0.0;
    double fit_residual = 0.0; // weighted r.m.s. misfit / profile peak
};

namespace fit_detail {

inline std::vector<double> moving_average(const std::vector<double>& v, int w) {
    const int n = static_cast<int>(v.size());
    w = std::clamp(w, 1, n);
    std::vector<double> out(n);
    std::vector<double> cum(n + 1, 0.0);
    for (int i = 0; i < n; ++i) cum[i + 1] = cum[i] + v[i];
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - w / 2);
        const int hi = std::min(n, lo + w);
        lo = std::max(0, hi - w);
        out[i] = (cum[hi] - cum[lo]) / (hi - lo);
    }
    return out;
}

struct CosFit {
    double c = 0.0, p = 0.0, q = 0.0; // model c + p cos + q sin
    double residual = 0.0;            // weighted rms
};

// Weighted least squares of y against {1, cos(2 pi x / L), sin(2 pi x / L)}.
inline CosFit cosine_fit(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& w, double L) {
    double S[3][3] = {};
    double r[3] = {};
    const double om = 2.0 * std::numbers::pi / L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double b[3] = {1.0, std::cos(om * x[i]), std::sin(om * x[i])};
        for (int a = 0; a < 3; ++a) {
            r[a] += w[i] * b[a] * y[i];
            for (int c = 0; c < 3; ++c) S[a][c] += w[i] * b[a] * b[c];
        }
    }
    // 3x3 solve by Cramer's rule
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double D = det3(S);
    if (!(std::abs(D) > 0.0)) throw fit_error("measure_visibility: singular fit system");
    CosFit f;
    double M[3][3];
    double* coef[3] = {&f.c, &f.p, &f.q};
    for (int col = 0; col < 3; ++col) {
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) M[a][c] = (c == col) ? r[a] : S[a][c];
        *coef[col] = det3(M) / D;
    }
    double se = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double m = f.c + f.p * std::cos(om * x[i]) + f.q * std::sin(om * x[i]);
        se += w[i] * (y[i] - m) * (y[i] - m);
        sw += w[i];
    }
    f.residual = std::sqrt(se / sw);
    return f;
}

// Coarse scan then golden-section refinement of the period that minimizes
// the fit residual.
template <typename F>
inline double best_period(double hint, F&& residual_of) {
    double best = hint, bestr = residual_of(hint);
    const int steps = 61;
    for (int s = 0; s < steps; ++s) {
        const double L = hint * (0.85 + 0.30 * s / (steps - 1));
        const double r = residual_of(L);
        if (r < bestr) {
            bestr = r;
            best = L;
        }
    }
    double lo = best * (1.0 - 0.30 / (steps - 1) * 1.5);
    double hi = best * (1.0 + 0.30 / (steps - 1) * 1.5);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = residual_of(x1), f2 = residual_of(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = residual_of(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = residual_of(x2);
        }
    }
    return (f1 < f2) ? x1 : x2;
}

} // namespace fit_detail

// Least-squares fringe fit of c (1 + V cos(2 pi x / L + phi)) over the
// envelope-weighted central window. Exact-model inputs are recovered
// exactly; enveloped profiles are first flattened by a smoothed envelope
// estimate. Residual above 10% of peak is an unreliable fit.
inline FringeMetrics measure_visibility(const std::vector<double>& x, const std::vector<double>& I,
                                        double period_hint) {
    if (x.size() != I.size() || x.size() < 16)
        throw config_error("measure_visibility: need matching x/I arrays of at least 16 samples");
    if (!(period_hint > 0.0)) throw config_error("measure_visibility: period hint must be positive");
    for (double v : I)
        if (v < -1e-12 * std::abs(I[0] + 1.0))
            throw config_error("measure_visibility: intensities must be non-negative");
    const double span = x.back() - x.front();
    if (!(span >= 5.0 * period_hint))
        throw fit_error("measure_visibility: window holds fewer than 5 fringe periods");
    const double dx = span / (static_cast<double>(x.size()) - 1.0);
    const double peak = *std::max_element(I.begin(), I.end());
    if (!(peak > 0.0)) throw degenerate_error("measure_visibility: profile is identically zero");

    // envelope estimate: cascaded one- and two-period moving averages
    auto env = fit_detail::moving_average(I, std::max(2, static_cast<int>(std::lround(period_hint / dx))));
    env = fit_detail::moving_average(env, std::max(2, static_cast<int>(std::lround(2.0 * period_hint / dx))));
    const double env_max = *std::max_element(env.begin(), env.end());
    std::vector<double> w(I.size());
    for (std::size_t i = 0; i < I.size(); ++i) {
        const double e = env[i] / env_max;
        w[i] = (e > 1e-3) ? e * e : 0.0;
    }

    auto finish = [&](const fit_detail::CosFit& f, double L, double scale) {
        if (!(f.c > 0.0)) throw fit_error("measure_visibility: non-positive fitted baseline");
        FringeMetrics m;
        m.V_measured = std::sqrt(f.p * f.p + f.q * f.q) / f.c;
        m.phi_measured = std::atan2(-f.q, f.p);
        m.period_measured = L;
        m.fit_residual = f.residual / scale;
        return m;
    };

    // pass 1: raw data (exact when the profile really is c (1 + V cos))
    auto raw_res = [&](double L) { return fit_detail::cosine_fit(x, I, w, L).residual; };
    const double L_raw = fit_detail::best_period(period_hint, raw_res);
    const auto fit_raw = fit_detail::cosine_fit(x, I, w, L_raw);
    if (fit_raw.residual / peak <= 1e-6) return finish(fit_raw, L_raw, peak);

    // pass 2: flatten by the envelope estimate, then refit
    std::vector<double> flat(I.size(), 0.0);
    for (std::size_t i = 0; i < I.size(); ++i)
        if (w[i] > 0.0) flat[i] = I[i] / env[i];
    auto flat_res = [&](double L) { return fit_detail::cosine_fit(x, flat, w, L).residual; };
    const double L_flat = fit_detail::best_period(period_hint, flat_res);
    const auto fit_flat = fit_detail::cosine_fit(x, flat, w, L_flat);
    const double flat_peak = *std::max_element(flat.begin(), flat.end());
    FringeMetrics m = finish(fit_flat, L_flat, flat_peak);
    if (m.fit_residual > 0.10)
        throw fit_error("measure_visibility: unreliable fit (residual above 10% of peak)");
    return m;
}

// Secondary estimator: raw extrema over the central third of the window.
inline double visibility_extrema(const std::vector<double>& I) {
    if (I.size() < 8) throw config_error("visibility_extrema: too few samples");
    const std::size_t lo = I.size() / 3, hi = 2 * I.size() / 3;
    double mn = I[lo], mx = I[lo];
    for (std::size_t i = lo; i < hi; ++i) {
        mn = std::min(mn, I[i]);
        mx = std::max(mx, I[i]);
    }
    if (!(mx + mn > 0.0)) throw degenerate_error("visibility_extrema: zero profile");
    return (mx - mn) / (mx + mn);
}

// Which-way information measured from integrated spot masses on either side
// of split_x. Requires the two spots to be resolved: the saddle of the
// y-marginal between the peaks must stay below 10% of the smaller peak.
inline double measure_distinguishability(const IntensityMap& map, double split_x = 0.0) {
    std::vector<double> marginal(map.grid.nx, 0.0);
    for (int j = 0; j < map.grid.ny; ++j)
        for (int i = 0; i < map.grid.nx; ++i) marginal[i] += map.at(i, j);
    double mass_left = 0.0, mass_right = 0.0;
    int iL = -1, iR = -1;
    for (int i = 0; i < map.grid.nx; ++i) {
        const double xx = map.grid.x(i);
        if (xx < split_x) {
            mass_left += marginal[i];
            if (iL < 0 || marginal[i] > marginal[iL]) iL = i;
        } else if (xx > split_x) {
            mass_right += marginal[i];
            if (iR < 0 || marginal[i] > marginal[iR]) iR = i;
        } else {
            mass_left += marginal[i] / 2.0;
            mass_right += marginal[i] / 2.0;
        }
    }
    const double total = mass_left + mass_right;
    if (!(total > 0.0)) throw degenerate_error("measure_distinguishability: zero image");
    if (iL < 0 || iR < 0) throw separation_error("measure_distinguishability: a half-plane is empty");
    double saddle = marginal[iL];
    for (int i = iL; i <= iR; ++i) saddle = std::min(saddle, marginal[i]);
    if (!(saddle < 0.10 * std::min(marginal[iL], marginal[iR])))
        throw separation_error("measure_distinguishability: spots overlap (saddle above 10% of peak)");
    return std::abs(mass_right - mass_left) / total;
}

// Mass-weighted x centroids of the two half-planes (left of / right of split_x).
inline std::pair<double, double> spot_centroids(const IntensityMap& map, double split_x = 0.0) {
    double mL = 0.0, mR = 0.0, sL = 0.0, sR = 0.0;
    for (int j = 0; j < map.grid.ny; ++j)
        for (int i = 0; i < map.grid.nx; ++i) {
            const double xx = map.grid.x(i);
            const double v = map.at(i, j);
            if (xx < split_x) {
                mL += v;
                sL += v * xx;
            } else if (xx > split_x) {
                mR += v;
                sR += v * xx;
            }
        }
    if (!(mL > 0.0) || !(mR > 0.0))
        throw degenerate_error("spot_centroids: a half-plane carries no intensity");
    return {sL / mL, sR / mR};
}

// Fraction of power removed between two snapshots bracketing an element.
inline double absorption_fraction(const ComplexField& before, const ComplexField& after) {
    if (!(before.grid == after.grid))
        throw config_error("absorption_fraction: before/after grids differ");
    const double pb = total_power(before), pa = total_power(after);
    if (!(pb > 0.0)) throw degenerate_error("absorption_fraction: zero incident power");
    if (pa > pb * (1.0 + 1e-12))
        throw accounting_error("absorption_fraction: power increased across the element");
    return std::clamp(1.0 - pa / pb, 0.0, 1.0);
}

struct PhotonEvent {
    std::uint64_t id = 0;
    Plane plane = Plane::custom;
    double x = 0.0;
    double y = 0.0;
};

// n i.i.d. detection positions drawn from the normalized intensity
// (cell-weighted, uniform jitter within the chosen cell). Deterministic for
// a given seed within one build.
inline std::vector<PhotonEvent> sample_photons(const IntensityMap& map, std::size_t n,
                                               std::uint64_t seed, Plane plane = Plane::custom,
                                               std::uint64_t first_id = 0) {
    if (n < 1) throw config_error("sample_photons: need at least one event");
    std::vector<double> cum(map.values.size());
    double total = 0.0;
    for (std::size_t c = 0; c < map.values.size(); ++c) {
        if (map.values[c] < 0.0) throw config_error("sample_photons: negative intensity");
        total += map.values[c];
        cum[c] = total;
    }
    if (!(total > 0.0)) throw degenerate_error("sample_photons: zero total intensity");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<PhotonEvent> events;
    events.reserve(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double u = uni(rng) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::size_t c = static_cast<std::size_t>(std::distance(cum.begin(), it));
        if (c >= cum.size()) c = cum.size() - 1;
        const int i = static_cast<int>(c % static_cast<std::size_t>(map.grid.nx));
        const int j = static_cast<int>(c / static_cast<std::size_t>(map.grid.nx));
        PhotonEvent e;
        e.id = first_id + m;
        e.plane = plane;
        e.x = map.grid.x(i) + (uni(rng) - 0.5) * map.grid.dx;
        e.y = map.grid.y(j) + (uni(rng) - 0.5) * map.grid.dy;
        events.push_back(e);
    }
    return events;
}

// Accounting for the rule that one detection event may inform exactly one
// statistic. consume() is atomic: either every id in the call is granted to
// the statistic, or nothing changes and the call throws.
class EventLedger {
public:
    void add_events(const std::vector<PhotonEvent>& evs) {
        std::lock_guard<std::mutex> lock(m_);
        for (const auto& e : evs) {
            if (!events_.insert(e.id).second)
                throw accounting_error("ledger: duplicate event id " + std::to_string(e.id));
        }
    }

    void consume(const std::vector<std::uint64_t>& ids, const std::string& statistic_id) {
        std::lock_guard<std::mutex> lock(m_);
        std::unordered_set<std::uint64_t> in_call;
        for (std::uint64_t id : ids) {
            if (!events_.count(id))
                throw accounting_error("ledger: unknown event id " + std::to_string(id));
            if (!in_call.insert(id).second)
                throw complementarity_error("ledger: event " + std::to_string(id) +
                                            " offered twice to '" + statistic_id + "'");
            const auto it = consumed_.find(id);
            if (it != consumed_.end())
                throw complementarity_error("ledger: event " + std::to_string(id) +
                                            " already consumed by '" + it->second +
                                            "'; it cannot also inform '" + statistic_id + "'");
        }
        for (std::uint64_t id : ids) consumed_.emplace(id, statistic_id);
    }

    std::size_t event_count() const {
        std::lock_guard<std::mutex> lock(m_);
        return events_.size();
    }
    std::size_t consumed_count() const {
        std::lock_guard<std::mutex> lock(m_);
        return consumed_.size();
    }
    std::optional<std::string> consumer_of(std::uint64_t id) const {
        std::lock_guard<std::mutex> lock(m_);
        const auto it = consumed_.find(id);
        if (it == consumed_.end()) return std::nullopt;
        return it->second;
    }

private:
    mutable std::mutex m_;
    std::unordered_set<std::uint64_t> events_;
    std::unordered_map<std::uint64_t, std::string> consumed_;
};

inline void consume_events(EventLedger& ledger, const std::vector<std::uint64_t>& ids,
                           const std::string& statistic_id) {
    ledger.consume(ids, statistic_id);
}

// Accounting summary of the wire-absorbed vs image-detected sub-ensembles.
// Consumes both sets (each under its own statistic), so overlapping inputs
// fail with the ledger's own error.
struct WireSubensembleReport {
    std::size_t n_absorbed = 0;
    std::size_t n_image = 0;
    double absorbed_fraction = 0.0;
    double image_fraction = 0.0;
    std::string statement;
};

inline WireSubensembleReport wire_subensemble_report(EventLedger& ledger,
                                                     const std::vector<std::uint64_t>& wire_ids,
                                                     const std::vector<std::uint64_t>& image_ids) {
    std::unordered_set<std::uint64_t> ws(wire_ids.begin(), wire_ids.end());
    for (std::uint64_t id : image_ids)
        if (ws.count(id))
            throw complementarity_error("wire_subensemble_report: event " + std::to_string(id) +
                                        " appears in both sub-ensembles");
    ledger.consume(wire_ids, "fringe_minima_statistics");
    ledger.consume(image_ids, "image_statistics");
    WireSubensembleReport r;
    r.n_absorbed = wire_ids.size();
    r.n_image = image_ids.size();
    const double total = static_cast<double>(r.n_absorbed + r.n_image);
    if (total > 0.0) {
        r.absorbed_fraction = r.n_absorbed / total;
        r.image_fraction = r.n_image / total;
    }
    r.statement = "only the absorbed subset informs the fringe minima; "
                  "the image-detected subset carries no fringe information";
    return r;
}

} // namespace waveopt
