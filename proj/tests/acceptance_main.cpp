// Acceptance gate: one line per criterion, full-size grids, exit 1 on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <waveopt/waveopt.hpp>

using namespace waveopt;

namespace {

int failures = 0;

void report(int n, const char* name, bool ok, const std::string& detail) {
    std::printf("%s %d. %s (%s)\n", ok ? "PASS" : "FAIL", n, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct RatioResult {
    double duality_sum = 0.0;
    double V = 0.0;
    double D = 0.0;
    double period = 0.0;
    double resid_focal = 0.0;
    double resid_image = 0.0;
    IntensityMap image;
};

RatioResult run_ratio(const ScenarioConfig& sc, double ratio) {
    OpticalConfig optics = sc.optics;
    std::tie(optics.A, optics.B) = amplitudes_for_ratio(ratio);
    scenario_detail::BenchFields bench = scenario_detail::bench_run(sc, optics);
    const GridSpec go = sc.observation_grid();

    RatioResult r;
    IntensityMap focal_map = intensity_of(bench.focal);
    Profile focal_cut = axis_cut(focal_map);
    const FringeMetrics m =
        measure_visibility(focal_cut.x, focal_cut.intensity, fringe_period_focal(optics));
    r.V = m.V_measured;
    r.period = m.period_measured;
    r.image = intensity_of(bench.image);
    r.D = measure_distinguishability(r.image);
    r.duality_sum = r.D * r.D + r.V * r.V;
    r.resid_focal = scenario_detail::cut_residual(
        focal_cut, reference_cut(scenario_detail::reference_branches(optics, Plane::focal), go));
    r.resid_image = scenario_detail::cut_residual(
        axis_cut(r.image), reference_cut(scenario_detail::reference_branches(optics, Plane::image), go));
    return r;
}

std::vector<PhotonEvent> numbered_events(std::uint64_t n) {
    std::vector<PhotonEvent> evs(n);
    for (std::uint64_t i = 0; i < n; ++i) evs[i].id = i;
    return evs;
}

} // namespace

int main() {
    const ScenarioConfig defaults; // 2048^2 grids, symmetric pinholes
    const double ratios[] = {1.0, 2.0, 4.0, 10.0};

    // ----- 1: duality relation, analytic and measured --------------------------
    std::vector<RatioResult> rr;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double worst_analytic = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const cdouble A{uni(rng), uni(rng)}, B{uni(rng), uni(rng)};
            if (!(std::norm(A) + std::norm(B) > 1e-12)) continue;
            worst_analytic =
                std::max(worst_analytic, std::abs(duality_check(A, B).duality_sum - 1.0));
        }
        double worst_measured = 0.0;
        for (double r : ratios) {
            rr.push_back(run_ratio(defaults, r));
            worst_measured = std::max(worst_measured, std::abs(rr.back().duality_sum - 1.0));
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(1, "duality relation D^2 + V^2 = 1",
               worst_analytic <= 1e-12 && worst_measured <= 0.02 && secs < 120.0,
               "analytic |sum-1| max " + fmt(worst_analytic) + " (tol 1e-12), measured max " +
                   fmt(worst_measured) + " (tol 0.02) over ratios 1,2,4,10, " + fmt(secs) +
                   " s (limit 120)");
    } catch (const std::exception& e) {
        report(1, "duality relation D^2 + V^2 = 1", false, e.what());
    }

    // ----- 2: fringe periods ----------------------------------------------------
    try {
        const double period_focal = rr.at(0).period;
        const double want_focal = fringe_period_focal(defaults.optics);
        ComplexField src = double_pinhole_field(defaults.optics, defaults.aperture_grid());
        ComplexField pre = fresnel_scaled(src, defaults.optics.p, defaults.observation_grid());
        Profile cut = axis_cut(intensity_of(pre));
        const FringeMetrics mp =
            measure_visibility(cut.x, cut.intensity, fringe_period_prelens(defaults.optics));
        const double want_pre = fringe_period_prelens(defaults.optics);
        const double err_f = std::abs(period_focal - want_focal) / want_focal;
        const double err_p = std::abs(mp.period_measured - want_pre) / want_pre;
        report(2, "fringe periods lambda f/d and lambda p/d", err_f <= 0.005 && err_p <= 0.005,
               "focal " + fmt(period_focal) + " m vs " + fmt(want_focal) + " m (" + fmt(err_f) +
                   "), pre-lens " + fmt(mp.period_measured) + " m vs " + fmt(want_pre) + " m (" +
                   fmt(err_p) + "), tol 0.5%");
    } catch (const std::exception& e) {
        report(2, "fringe periods lambda f/d and lambda p/d", false, e.what());
    }

    // ----- 3: imaging law -------------------------------------------------------
    try {
        const auto [cL, cR] = spot_centroids(rr.at(0).image);
        const double want =
            (defaults.optics.P_prime / defaults.optics.P) * defaults.optics.d / 2.0;
        const double pixel = defaults.observation_pitch;
        const bool centroids_ok = std::abs(cL + want) <= pixel && std::abs(cR - want) <= pixel;

        // amplitude ratio 2: spot masses must split 4:1 toward the brighter pinhole
        const IntensityMap& im2 = rr.at(1).image;
        double mass_left = 0.0, mass_right = 0.0;
        for (int j = 0; j < im2.grid.ny; ++j)
            for (int i = 0; i < im2.grid.nx; ++i) {
                if (im2.grid.x(i) < 0.0) mass_left += im2.at(i, j);
                else if (im2.grid.x(i) > 0.0) mass_right += im2.at(i, j);
            }
        const double mass_ratio = mass_right / mass_left;
        const bool mass_ok = std::abs(mass_ratio - 4.0) / 4.0 <= 0.02;
        report(3, "imaging law: centroids and spot masses", centroids_ok && mass_ok,
               "centroids " + fmt(cL) + " / " + fmt(cR) + " m vs +-" + fmt(want) +
                   " m (tol 1 px = " + fmt(pixel) + " m), mass ratio " + fmt(mass_ratio) +
                   " vs 4 (tol 2%)");
    } catch (const std::exception& e) {
        report(3, "imaging law: centroids and spot masses", false, e.what());
    }

    // ----- 4: wire-grid suppression ----------------------------------------------
    try {
        ScenarioConfig wd = defaults;
        wd.scenario = "wire_grid_double";
        const RunReport double_rep = run_scenario(wd);
        ScenarioConfig ws = defaults;
        ws.scenario = "wire_grid_single";
        const RunReport single_rep = run_scenario(ws);
        const double Rd = double_rep.summary.at(0).R;
        const double Rs = single_rep.summary.at(0).R;
        const double w = 0.06 * fringe_period_focal(defaults.optics);
        const double quad = std::numbers::pi * std::numbers::pi / 6.0 *
                            std::pow(w / fringe_period_focal(defaults.optics), 3.0);
        const bool ok = std::abs(Rs - 0.06) <= 0.01 && Rd <= 0.005 && Rd >= quad / 2.0 &&
                        Rd <= quad * 2.0;
        report(4, "wire grid: single-pinhole vs double-pinhole absorption", ok,
               "R_single " + fmt(Rs) + " (0.06 +- 0.01), R_double " + fmt(Rd) +
                   " (<= 0.005 and within 2x of " + fmt(quad) + ")");
    } catch (const std::exception& e) {
        report(4, "wire grid: single-pinhole vs double-pinhole absorption", false, e.what());
    }

    // ----- 5: scatterer at an exact minimum --------------------------------------
    try {
        const OpticalConfig& c = defaults.optics;
        double x0 = 0.0;
        for (double xm : focal_minima(c, 8))
            if (xm > 0.0) {
                x0 = xm;
                break;
            }
        const cdouble pol(0.1, 0.0);
        OpticalConfig single = c;
        single.A = 1.0;
        single.B = 0.0;
        double peak_both = 0.0, peak_one = 0.0;
        for (double X = -4e-4; X <= 4e-4; X += 2e-6) {
            peak_both = std::max(peak_both, scattered_image_intensity(c, x0, 0.0, 0.0, X));
            peak_one = std::max(peak_one, scattered_image_intensity(single, x0, 0.0, 0.0, X));
        }
        double diff_both = 0.0;
        double bg = 0.0;
        int nbg = 0;
        for (double X = -4e-4; X <= 4e-4; X += 2e-6) {
            diff_both = std::max(diff_both,
                                 std::abs(scattered_image_intensity(c, x0, 0.0, pol, X) -
                                          scattered_image_intensity(c, x0, 0.0, 0.0, X)) /
                                     peak_both);
            if (std::abs(X) >= 3e-4) {
                bg += (scattered_image_intensity(single, x0, 0.0, pol, X) -
                       scattered_image_intensity(single, x0, 0.0, 0.0, X)) /
                      peak_one;
                ++nbg;
            }
        }
        bg /= nbg;
        const bool ok = diff_both <= 1e-6 && bg > 0.0 && bg >= 1e3 * diff_both;
        report(5, "scatterer at a dark fringe leaves the image unchanged", ok,
               "double-pinhole change " + fmt(diff_both) + " of peak (tol 1e-6), single-pinhole background " +
                   fmt(bg) + " (>= 1e3x)");
    } catch (const std::exception& e) {
        report(5, "scatterer at a dark fringe leaves the image unchanged", false, e.what());
    }

    // ----- 6: the cross-ensemble bookkeeping mistake ------------------------------
    try {
        const MisuseReport mis =
            duality_misuse_demo(std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0);
        const bool ok = mis.sum == 2.0 && mis.cross_ensemble;
        report(6, "sub-ensemble D' with full-ensemble V sums to exactly 2", ok,
               "sum = " + fmt(mis.sum) + " (exact 2.0 required), cross_ensemble = " +
                   (mis.cross_ensemble ? "true" : "false"));
    } catch (const std::exception& e) {
        report(6, "sub-ensemble D' with full-ensemble V sums to exactly 2", false, e.what());
    }

    // ----- 7: sinusoidal object behind a two-hole focal screen --------------------
    try {
        ScenarioConfig sin_cfg = defaults;
        sin_cfg.scenario = "sinusoidal_screen";
        const RunReport rep = run_scenario(sin_cfg);
        const double R = rep.summary.at(0).R;
        const double V = rep.summary.at(0).V;
        const bool ok = R < 1e-3 && V > 0.95;
        report(7, "two-hole focal screen: negligible absorption, high image contrast", ok,
               "screen absorbed " + fmt(R) + " of incident power (tol 1e-3), image V = " + fmt(V) +
                   " (> 0.95)");
    } catch (const std::exception& e) {
        report(7, "two-hole focal screen: negligible absorption, high image contrast", false,
               e.what());
    }

    // ----- 8: ledger forbids double counting --------------------------------------
    try {
        bool ok = true;
        std::string why;
        // exhaustive over all subset pairs of six events
        const int n = 6;
        int attempted = 0, detected = 0;
        for (unsigned s1 = 0; s1 < (1u << n) && ok; ++s1)
            for (unsigned s2 = 0; s2 < (1u << n); ++s2) {
                EventLedger ledger;
                ledger.add_events(numbered_events(n));
                std::vector<std::uint64_t> a, b;
                for (int i = 0; i < n; ++i) {
                    if (s1 & (1u << i)) a.push_back(i);
                    if (s2 & (1u << i)) b.push_back(i);
                }
                ledger.consume(a, "first");
                const bool overlap = (s1 & s2) != 0;
                if (overlap) ++attempted;
                bool threw = false;
                try {
                    ledger.consume(b, "second");
                } catch (const complementarity_error&) {
                    threw = true;
                }
                if (overlap && threw) ++detected;
                const std::size_t want = overlap ? a.size() : a.size() + b.size();
                if (threw != overlap || ledger.consumed_count() != want) {
                    ok = false;
                    why = "exhaustive pair s1=" + std::to_string(s1) + " s2=" + std::to_string(s2);
                    break;
                }
            }
        // randomized long run over ten thousand events
        int rand_attempted = 0, rand_detected = 0;
        if (ok) {
            const std::uint64_t N = 10000;
            EventLedger ledger;
            ledger.add_events(numbered_events(N));
            std::unordered_map<std::uint64_t, std::string> shadow;
            std::mt19937_64 rng(7);
            std::uniform_int_distribution<std::uint64_t> pick(0, N - 1);
            std::uniform_int_distribution<int> size_of(1, 50);
            for (int attempt = 0; attempt < 2000 && ok; ++attempt) {
                std::vector<std::uint64_t> ids;
                std::unordered_map<std::uint64_t, bool> used;
                const int m = size_of(rng);
                while (static_cast<int>(ids.size()) < m) {
                    const std::uint64_t id = pick(rng);
                    if (!used[id]) {
                        used[id] = true;
                        ids.push_back(id);
                    }
                }
                const std::string stat = "stat_" + std::to_string(attempt);
                bool overlap = false;
                for (std::uint64_t id : ids) overlap = overlap || shadow.count(id);
                if (overlap) ++rand_attempted;
                bool threw = false;
                try {
                    ledger.consume(ids, stat);
                } catch (const complementarity_error&) {
                    threw = true;
                }
                if (threw != overlap) {
                    ok = false;
                    why = "randomized attempt " + std::to_string(attempt);
                    break;
                }
                if (threw) {
                    ++rand_detected;
                } else {
                    for (std::uint64_t id : ids) shadow[id] = stat;
                }
            }
            if (ok && ledger.consumed_count() != shadow.size()) {
                ok = false;
                why = "ledger count diverged from the shadow model";
            }
            if (ok)
                for (const auto& [id, stat] : shadow)
                    if (ledger.consumer_of(id).value_or("") != stat) {
                        ok = false;
                        why = "owner mismatch on event " + std::to_string(id);
                        break;
                    }
        }
        ok = ok && attempted > 0 && detected == attempted && rand_attempted > 0 &&
             rand_detected == rand_attempted;
        report(8, "event ledger blocks every double consumption", ok,
               ok ? "exhaustive 6-event pairs: " + std::to_string(detected) + "/" +
                        std::to_string(attempted) + " violations caught; randomized 10^4 events: " +
                        std::to_string(rand_detected) + "/" + std::to_string(rand_attempted) +
                        " caught (100% required)"
                  : why);
    } catch (const std::exception& e) {
        report(8, "event ledger blocks every double consumption", false, e.what());
    }

    // ----- 9: cross-engine agreement and propagator invariants --------------------
    try {
        const double worst_cut = std::max(rr.at(0).resid_focal, rr.at(0).resid_image);

        const GridSpec g = centered_grid(256, 4e-6);
        ComplexField f(g, 532e-9);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
                f.at(i, j) = std::exp(-r2 / (2.0 * 8e-5 * 8e-5));
            }
        const ComplexField one = angular_spectrum(f, 0.01);
        const ComplexField two = angular_spectrum(angular_spectrum(f, 0.004), 0.006);
        double scale = 0.0, semi = 0.0;
        for (const auto& v : one.values) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < one.values.size(); ++i)
            semi = std::max(semi, std::abs(one.values[i] - two.values[i]));
        semi /= scale;

        ComplexField h = f;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) h.at(i, j) *= std::exp(cdouble(0.0, 2e4 * g.x(i)));
        const cdouble ca(0.6, -0.3), cb(-0.2, 0.8);
        ComplexField mix(g, 532e-9);
        for (std::size_t i = 0; i < mix.values.size(); ++i)
            mix.values[i] = ca * f.values[i] + cb * h.values[i];
        const ComplexField lhs = angular_spectrum(mix, 0.01);
        const ComplexField pf = angular_spectrum(f, 0.01);
        const ComplexField ph = angular_spectrum(h, 0.01);
        double lin = 0.0;
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            lin = std::max(lin, std::abs(lhs.values[i] - (ca * pf.values[i] + cb * ph.values[i])));
        lin /= scale;

        const bool ok = worst_cut < 0.01 && semi <= 1e-10 && lin <= 1e-10;
        report(9, "independent engines agree; propagator is a linear semigroup", ok,
               "worst cut r.m.s. residual " + fmt(worst_cut) + " of peak (tol 0.01), semigroup " +
                   fmt(semi) + ", linearity " + fmt(lin) + " (tol 1e-10)");
    } catch (const std::exception& e) {
        report(9, "independent engines agree; propagator is a linear semigroup", false, e.what());
    }

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all acceptance criteria passed\n");
    return failures ? 1 : 0;
}
