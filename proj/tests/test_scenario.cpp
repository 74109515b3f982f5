#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <waveopt/waveopt.hpp>

using namespace waveopt;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string data_file(const std::string& name) {
    return std::string(WAVEOPT_TEST_DATA_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("empty config text yields the documented defaults") {
    const ScenarioConfig c = parse_config_text("");
    REQUIRE(c.scenario == "focal_fringes");
    REQUIRE(c.grid_n == 2048);
    REQUIRE_THAT(c.optics.wavelength, WithinRel(532e-9, 1e-15));
    REQUIRE_THAT(c.optics.d, WithinRel(200e-6, 1e-15));
    REQUIRE_THAT(c.optics.f, WithinRel(0.1, 1e-15));
    REQUIRE_THAT(c.optics.P, WithinRel(0.2, 1e-15));
    REQUIRE_THAT(c.optics.P_prime, WithinRel(0.2, 1e-15));
    REQUIRE_THAT(c.aperture_pitch, WithinRel(2e-6, 1e-15));
    REQUIRE_THAT(c.observation_pitch, WithinRel(4.8e-6, 1e-15));
    REQUIRE(c.wire_count == 8);
    REQUIRE(c.photons == 100000);
    REQUIRE(c.seed == 12345);
    validate_config(c); // defaults must be self-consistent
}

TEST_CASE("config text accepts comments, blank lines, and loose spacing") {
    const std::string text = "# fringe bench\n"
                             "scenario = image_spots\n"
                             "\n"
                             "wavelength = 650e-9   # trailing comment\n"
                             "grid_n=1024\n"
                             "amplitude_ratio = 2\n"
                             "output_dir = results\n"
                             "seed = 99\n";
    const ScenarioConfig c = parse_config_text(text);
    REQUIRE(c.scenario == "image_spots");
    REQUIRE_THAT(c.optics.wavelength, WithinRel(650e-9, 1e-15));
    REQUIRE(c.grid_n == 1024);
    REQUIRE(c.output_dir == "results");
    REQUIRE(c.seed == 99);
    // amplitude_ratio = 2 pins the which-way contrast at 3/5
    REQUIRE_THAT(distinguishability(c.optics.A, c.optics.B), WithinAbs(0.6, 1e-12));
    const double unit = std::norm(c.optics.A) + std::norm(c.optics.B);
    REQUIRE_THAT(unit, WithinAbs(1.0, 1e-12));
}

TEST_CASE("config parsing reports precise errors") {
    REQUIRE_THROWS_WITH(parse_config_text("warp_factor = 9\n"),
                        ContainsSubstring("line 1") && ContainsSubstring("warp_factor"));
    REQUIRE_THROWS_WITH(parse_config_text("grid_n = 512\n\ngrid_n = 256\n"),
                        ContainsSubstring("duplicate") && ContainsSubstring("line 1"));
    REQUIRE_THROWS_WITH(parse_config_text("grid_n = banana\n"), ContainsSubstring("line 1"));
    REQUIRE_THROWS_WITH(parse_config_text("grid_n 512\n"), ContainsSubstring("key=value"));
    REQUIRE_THROWS_AS(parse_config_text("wavelength = 1e\n"), config_error);
}

TEST_CASE("config validation enforces scenario-specific geometry") {
    // parse_config_text validates, so a parsed config is always usable
    REQUIRE_THROWS_WITH(parse_config_text("wavelength = -5e-7\n"),
                        ContainsSubstring("wavelength"));
    REQUIRE_THROWS_WITH(parse_config_text("scenario = image_spots\nlens_to_observation = 0.25\n"),
                        ContainsSubstring("lens equation"));
    // the pure fringe scenario tolerates a detuned observation plane
    validate_config(parse_config_text("lens_to_observation = 0.25\n"));

    ScenarioConfig unknown = parse_config_text("");
    unknown.scenario = "mystery";
    REQUIRE_THROWS_WITH(validate_config(unknown), ContainsSubstring("mystery"));

    REQUIRE_THROWS_WITH(parse_config_text("grid_n = 8\n"), ContainsSubstring("grid_n"));
    REQUIRE_THROWS_WITH(parse_config_text("wire_fill = 1.5\n"), ContainsSubstring("wire_fill"));
}

TEST_CASE("config files load from disk") {
    const ScenarioConfig c = load_config(data_file("small_focal.cfg"));
    REQUIRE(c.scenario == "focal_fringes");
    REQUIRE(c.grid_n == 512);
    REQUIRE_THAT(c.optics.d, WithinRel(4e-4, 1e-15));
    REQUIRE_THROWS_WITH(load_config(data_file("no_such_file.cfg")),
                        ContainsSubstring("no_such_file"));
}

TEST_CASE("profile CSV bytes are exact for representable values") {
    std::filesystem::create_directories("exports_tmp");
    Profile p;
    p.x = {0.5, 1.0};
    p.intensity = {0.25, 2.0};
    write_profile_csv("exports_tmp/profile.csv", p);
    REQUIRE(read_file("exports_tmp/profile.csv") == "x_m,intensity\n0.5,0.25\n1,2\n");
}

TEST_CASE("summary CSV carries the fixed header and nan placeholders") {
    std::filesystem::create_directories("exports_tmp");
    SummaryRow row;
    row.scenario = "s";
    write_summary_csv("exports_tmp/summary.csv", {row});
    REQUIRE(read_file("exports_tmp/summary.csv") ==
            "scenario,V,phi_rad,period_m,D,duality_sum,R,residual\n"
            "s,nan,nan,nan,nan,nan,nan,nan\n");
}

TEST_CASE("16-bit PGM layout: header, big-endian samples, peak normalization") {
    std::filesystem::create_directories("exports_tmp");
    const GridSpec g{2, 3, 1e-6, 1e-6, 0.0, 0.0};
    IntensityMap m{g, std::vector<double>(6, 0.0)};
    m.at(0, 0) = 1.0;
    m.at(0, 1) = 0.25;
    m.at(1, 2) = 0.5;
    write_pgm16("exports_tmp/map.pgm", m);
    std::string expect = "P5\n2 3\n65535\n";
    const unsigned char payload[12] = {0xff, 0xff, 0x00, 0x00, 0x40, 0x00,
                                       0x00, 0x00, 0x00, 0x00, 0x80, 0x00};
    expect.append(reinterpret_cast<const char*>(payload), sizeof payload);
    REQUIRE(read_file("exports_tmp/map.pgm") == expect);

    IntensityMap zero{GridSpec{2, 2, 1e-6, 1e-6, 0.0, 0.0}, std::vector<double>(4, 0.0)};
    write_pgm16("exports_tmp/zero.pgm", zero);
    REQUIRE(read_file("exports_tmp/zero.pgm") ==
            std::string("P5\n2 2\n65535\n") + std::string(8, '\0'));
}

TEST_CASE("events CSV lists id, plane name, and jittered position") {
    std::filesystem::create_directories("exports_tmp");
    PhotonEvent e;
    e.id = 7;
    e.plane = Plane::focal;
    e.x = 0.5;
    e.y = -0.25;
    write_events_csv("exports_tmp/events.csv", {e});
    REQUIRE(read_file("exports_tmp/events.csv") == "event_id,plane,x_m,y_m\n7,focal,0.5,-0.25\n");
}

TEST_CASE("a small fringe scenario runs, agrees, and exports deterministically") {
    const ScenarioConfig c = load_config(data_file("small_focal.cfg"));
    const RunReport rep = run_scenario(c);
    REQUIRE(rep.scenario == "focal_fringes");
    REQUIRE(rep.summary.size() == 1);
    REQUIRE(rep.planes.size() == 1);
    REQUIRE(rep.planes[0].label == "focal");
    REQUIRE(!rep.planes[0].map.values.empty());
    REQUIRE(rep.planes[0].cut.x.size() == 512);

    const SummaryRow& row = rep.summary[0];
    REQUIRE(row.V > 0.9);
    const double period = c.optics.wavelength * c.optics.f / c.optics.d;
    REQUIRE_THAT(row.period, WithinRel(period, 0.01));
    REQUIRE(rep.agreement_ok);
    REQUIRE(rep.worst_residual <= 0.01);
    REQUIRE_THAT(row.duality_sum, WithinAbs(1.0, 0.05));

    const RunReport again = run_scenario(c);
    export_outputs(rep, "determinism_a");
    export_outputs(again, "determinism_b");
    REQUIRE(read_file("determinism_a/summary.csv") == read_file("determinism_b/summary.csv"));
    REQUIRE(read_file("determinism_a/focal_profile.csv") ==
            read_file("determinism_b/focal_profile.csv"));
    REQUIRE(read_file("determinism_a/focal.pgm") == read_file("determinism_b/focal.pgm"));
}

TEST_CASE("photon sampling yields one accounted event per photon") {
    const ScenarioConfig c = load_config(data_file("small_photon.cfg"));
    REQUIRE(c.scenario == "photon_sampling");
    const RunReport rep = run_scenario(c);

    REQUIRE(rep.events.size() == c.photons);
    std::set<std::uint64_t> ids;
    std::size_t absorbed = 0, detected = 0;
    for (const auto& e : rep.events) {
        ids.insert(e.id);
        if (e.plane == Plane::focal) ++absorbed;
        else if (e.plane == Plane::image) ++detected;
    }
    REQUIRE(ids.size() == c.photons);
    REQUIRE(*ids.begin() == 0);
    REQUIRE(*ids.rbegin() == c.photons - 1);
    REQUIRE(absorbed + detected == c.photons);

    // absorbed events must sit inside a wire of the shared minima pattern
    const WireGridSpec wires = wire_grid_at_minima(c.optics, c.wire_count, c.wire_fill);
    for (const auto& e : rep.events) {
        if (e.plane != Plane::focal) continue;
        bool inside = false;
        for (double cw : wires.wire_centers)
            inside = inside || std::abs(e.x - cw) < wires.wire_width / 2.0;
        REQUIRE(inside);
    }

    const SummaryRow& row = rep.summary[0];
    REQUIRE_THAT(row.R, WithinAbs(static_cast<double>(absorbed) / c.photons, 1e-12));
    REQUIRE(row.R < 0.02);
    REQUIRE(row.V > 0.9);
    REQUIRE(rep.agreement_ok);

    bool has_statement = false;
    for (const auto& n : rep.notes)
        has_statement = has_statement || n.find("no fringe information") != std::string::npos;
    REQUIRE(has_statement);

    const RunReport again = run_scenario(c);
    REQUIRE(again.events.size() == rep.events.size());
    for (std::size_t i = 0; i < rep.events.size(); ++i) {
        REQUIRE(again.events[i].id == rep.events[i].id);
        REQUIRE(again.events[i].plane == rep.events[i].plane);
        REQUIRE(again.events[i].x == rep.events[i].x);
        REQUIRE(again.events[i].y == rep.events[i].y);
    }
}
