// Command-line front end: risradar <subcommand> [options].

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "risradar/commands.hpp"
#include "risradar/config.hpp"
#include "risradar/data_io.hpp"

int main(int argc, char** argv) {
    using namespace risradar;

    CLI::App app{"RIS-assisted radar coverage and signal-level simulation"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    std::string config_path;
    std::string out_dir = "risradar_out";
    std::vector<std::string> overrides;
    std::string sweep;
    std::uint64_t seed = 0;
    int threads = -1;
    bool dump_config = false;

    app.add_option("-c,--config", config_path, "scenario file (key = value with [sections])");
    app.add_option("-o,--out", out_dir, std::string("output directory (") + kOutputDirEnv + " overrides)");
    app.add_option("-s,--set", overrides, "section.key=value override, repeatable");
    app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

    const std::map<std::string, std::string> about{
        {"pattern", "induced pattern cut and beamwidths"},
        {"snr", "single-pulse and coherent SNR over a sweep"},
        {"pd", "detection probability over a sweep and Pd ranges"},
        {"scr", "surface and volume signal-to-clutter ratios"},
        {"timeline", "dwell timing and sector scan schedule"},
        {"simulate", "signal-level burst: D matrix, range-Doppler map, truth"},
        {"report", "reference checks and curve overlays"},
    };
    for (const auto& name : subcommand_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->fallthrough();
        sub->add_option("--sweep", sweep, "variable=start:stop:step (r2, r1, pulses, n, rcs)");
        sub->add_option("--seed", seed, "random seed (simulate)");
        sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    ScenarioConfig cfg;
    try {
        if (!config_path.empty()) cfg = parse_config(read_file(config_path));
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) throw ConfigError(o, "expected section.key=value");
            set_config_value(cfg, o.substr(0, eq), o.substr(eq + 1));
        }
        if (!sweep.empty()) apply_sweep_override(cfg, sweep);
        for (auto* sub : app.get_subcommands()) {
            if (sub->count("--seed")) cfg.simulation.seed = seed;
            if (sub->count("--threads")) cfg.simulation.threads = threads;
        }
        validate_config(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    if (dump_config) {
        std::cout << emit_config(cfg);
        return exit_ok;
    }
    return run_subcommand(app.get_subcommands().front()->get_name(), cfg, out_dir);
}
