#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <waveopt/waveopt.hpp>

namespace {

std::string g(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
}

void print_report(const waveopt::RunReport& rep) {
    std::printf("scenario: %s\n", rep.scenario.c_str());
    for (const auto& r : rep.summary)
        std::printf("  %-24s V=%s phi=%s period=%s D=%s duality=%s R=%s residual=%s\n",
                    r.scenario.c_str(), g(r.V).c_str(), g(r.phi).c_str(), g(r.period).c_str(),
                    g(r.D).c_str(), g(r.duality_sum).c_str(), g(r.R).c_str(),
                    g(r.residual).c_str());
    for (const auto& n : rep.notes) std::printf("  note: %s\n", n.c_str());
    if (std::isfinite(rep.worst_residual))
        std::printf("  cross-engine residual %s of peak (%s)\n", g(rep.worst_residual).c_str(),
                    rep.agreement_ok ? "within 1%" : "EXCEEDS 1%");
}

waveopt::ScenarioConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return {};
    return waveopt::load_config(config_path);
}

int do_run(const std::string& scenario, const std::string& config_path, const std::string& out_dir,
           std::optional<std::uint64_t> seed) {
    waveopt::ScenarioConfig cfg = base_config(config_path);
    cfg.scenario = scenario;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seed = *seed;
    waveopt::validate_config(cfg);
    const waveopt::RunReport rep = waveopt::run_scenario(cfg);
    print_report(rep);
    waveopt::export_outputs(rep, cfg.output_dir);
    std::printf("outputs written to %s\n", cfg.output_dir.c_str());
    return rep.agreement_ok ? 0 : 2;
}

int do_sweep(const std::string& scenario, const std::string& config_path, const std::string& out_dir,
             const std::string& param, const std::string& values_csv) {
    waveopt::ScenarioConfig base = base_config(config_path);
    if (!scenario.empty()) base.scenario = scenario;
    if (!out_dir.empty()) base.output_dir = out_dir;
    std::vector<std::string> values;
    std::string cur;
    for (char ch : values_csv) {
        if (ch == ',') {
            values.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    values.push_back(cur);
    if (values.empty() || (values.size() == 1 && values[0].empty()))
        throw waveopt::config_error("--values must list at least one value");

    std::vector<waveopt::SummaryRow> rows;
    bool all_ok = true;
    for (const auto& v : values) {
        waveopt::ScenarioConfig cfg = base;
        waveopt::apply_setting(cfg, param, v);
        waveopt::validate_config(cfg);
        const waveopt::RunReport rep = waveopt::run_scenario(cfg);
        std::printf("%s=%s:\n", param.c_str(), v.c_str());
        print_report(rep);
        for (auto row : rep.summary) {
            row.scenario += "{" + param + "=" + v + "}";
            rows.push_back(std::move(row));
        }
        all_ok = all_ok && rep.agreement_ok;
    }
    std::error_code ec;
    std::filesystem::create_directories(base.output_dir, ec);
    if (ec)
        throw waveopt::error("cannot create output directory " + base.output_dir + ": " +
                             ec.message());
    waveopt::write_summary_csv(base.output_dir + "/summary.csv", rows);
    std::printf("sweep summary written to %s/summary.csv\n", base.output_dir.c_str());
    return all_ok ? 0 : 2;
}

int do_validate(const std::string& config_path) {
    const waveopt::ScenarioConfig cfg = waveopt::load_config(config_path);
    const waveopt::ConfigValidity v = waveopt::config_validity(cfg.optics);
    std::printf("config ok: scenario %s\n", cfg.scenario.c_str());
    std::printf("  focal-plane phase ratio P/(k sigma^2) = %s (%s)\n", g(v.focal_ratio).c_str(),
                v.focal_valid ? "valid" : "too large");
    std::printf("  lens equation residual |eps|*f = %s (%s)\n",
                g(std::abs(v.epsilon_image) * cfg.optics.f).c_str(),
                v.lens_equation_ok ? "imaging plane" : "not an imaging plane");
    std::printf("  spot separation ratio k sigma d / P = %s (%s)\n", g(v.separation_ratio).c_str(),
                v.spots_separated ? "separated" : "overlapping");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-pinhole interferometer simulator"};
    app.require_subcommand(1);

    std::string scenario, config_path, out_dir, param, values_csv;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "run one scenario and export its outputs");
    run->add_option("scenario", scenario, "scenario name")->required();
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--seed", seed, "random seed for photon sampling");

    CLI::App* sweep = app.add_subcommand("sweep", "run one scenario across several parameter values");
    sweep->add_option("--param", param, "config key to vary")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--scenario", scenario, "scenario name (overrides the config)");
    sweep->add_option("--config", config_path, "key=value config file");
    sweep->add_option("--out", out_dir, "output directory (overrides the config)");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("--config", config_path, "key=value config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(scenario, config_path, out_dir, seed);
        if (sweep->parsed()) return do_sweep(scenario, config_path, out_dir, param, values_csv);
        if (validate->parsed()) return do_validate(config_path);
    } catch (const waveopt::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const waveopt::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
