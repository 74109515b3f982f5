#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "waveopt/analysis.hpp"
#include "waveopt/errors.hpp"
#include "waveopt/field.hpp"

namespace waveopt {

namespace export_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!os) throw error("cannot open for writing: " + path);
    return os;
}

} // namespace export_detail

// One row per sample of the y = 0 cut: `x_m,intensity`, LF endings.
inline void write_profile_csv(const std::string& path, const Profile& p) {
    auto os = export_detail::open_out(path, true);
    os << "x_m,intensity\n";
    for (std::size_t i = 0; i < p.x.size(); ++i)
        os << export_detail::fmt(p.x[i]) << ',' << export_detail::fmt(p.intensity[i]) << '\n';
    if (!os) throw error("write failed: " + path);
}

struct SummaryRow {
    std::string scenario;
    double V = std::numeric_limits<double>::quiet_NaN();
    double phi = std::numeric_limits<double>::quiet_NaN();
    double period = std::numeric_limits<double>::quiet_NaN();
    double D = std::numeric_limits<double>::quiet_NaN();
    double duality_sum = std::numeric_limits<double>::quiet_NaN();
    double R = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
};

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    auto os = export_detail::open_out(path, true);
    os << "scenario,V,phi_rad,period_m,D,duality_sum,R,residual\n";
    for (const auto& r : rows) {
        os << r.scenario << ',' << export_detail::fmt(r.V) << ',' << export_detail::fmt(r.phi)
           << ',' << export_detail::fmt(r.period) << ',' << export_detail::fmt(r.D) << ','
           << export_detail::fmt(r.duality_sum) << ',' << export_detail::fmt(r.R) << ','
           << export_detail::fmt(r.residual) << '\n';
    }
    if (!os) throw error("write failed: " + path);
}

// 16-bit binary PGM (P5, maxval 65535, most significant byte first),
// row-major top to bottom, linearly scaled so the plane maximum maps to 65535.
inline void write_pgm16(const std::string& path, const IntensityMap& map) {
    auto os = export_detail::open_out(path, true);
    os << "P5\n" << map.grid.nx << ' ' << map.grid.ny << "\n65535\n";
    const double mx = map.values.empty()
                          ? 0.0
                          : *std::max_element(map.values.begin(), map.values.end());
    const double scale = mx > 0.0 ? 65535.0 / mx : 0.0;
    std::vector<unsigned char> row(static_cast<std::size_t>(map.grid.nx) * 2);
    for (int j = 0; j < map.grid.ny; ++j) {
        for (int i = 0; i < map.grid.nx; ++i) {
            const auto v = static_cast<std::uint16_t>(std::lround(map.at(i, j) * scale));
            row[2 * i] = static_cast<unsigned char>(v >> 8);
            row[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!os) throw error("write failed: " + path);
}

inline void write_events_csv(const std::string& path, const std::vector<PhotonEvent>& events) {
    auto os = export_detail::open_out(path, true);
    os << "event_id,plane,x_m,y_m\n";
    for (const auto& e : events)
        os << e.id << ',' << plane_name(e.plane) << ',' << export_detail::fmt(e.x) << ','
           << export_detail::fmt(e.y) << '\n';
    if (!os) throw error("write failed: " + path);
}

} // namespace waveopt
