#pragma once

// Subcommands behind the command-line tool. Each writes its artifacts into an
// output directory and returns a process exit status.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "risradar/clutter.hpp"
#include "risradar/config.hpp"
#include "risradar/data_io.hpp"
#include "risradar/detection.hpp"
#include "risradar/echo_sim.hpp"
#include "risradar/link_budget.hpp"
#include "risradar/pattern.hpp"
#include "risradar/timeline.hpp"

namespace risradar {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutputDirEnv = "RISRADAR_OUTPUT_DIR";

enum ExitCode : int { exit_ok = 0, exit_config_error = 2, exit_validation_failure = 3 };

/// Inclusive start:stop:step range for a named variable.
struct SweepRange {
    std::string variable = "r2";
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> values() const {
        std::vector<double> v;
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) v.push_back(start + static_cast<double>(i) * step);
        return v;
    }
};

/// Parses "var=start:stop:step" into the configuration's sweep section.
inline void apply_sweep_override(ScenarioConfig& cfg, std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("sweep", "expected variable=start:stop:step");
    set_config_value(cfg, "sweep.variable", text.substr(0, eq));
    std::string_view rest = text.substr(eq + 1);
    const char* keys[] = {"sweep.start", "sweep.stop", "sweep.step"};
    for (int i = 0; i < 3; ++i) {
        const auto colon = rest.find(':');
        if ((i < 2) == (colon == std::string_view::npos)) {
            throw ConfigError("sweep", "expected variable=start:stop:step");
        }
        set_config_value(cfg, keys[i], rest.substr(0, colon));
        rest = colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
    }
    validate_config(cfg);
}

inline SweepRange sweep_of(const ScenarioConfig& cfg) {
    return {cfg.sweep.variable, cfg.sweep.start, cfg.sweep.stop, cfg.sweep.step};
}

/// Copy of `cfg` with the sweep variable set to `value`.
inline ScenarioConfig at_sweep_point(const ScenarioConfig& cfg, const std::string& variable, double value) {
    ScenarioConfig c = cfg;
    if (variable == "r2") c.scene.r2 = value;
    else if (variable == "r1") c.scene.r1 = value;
    else if (variable == "rcs") c.scene.rcs = value;
    else if (variable == "pulses") c.timeline.pulses = static_cast<int>(std::lround(value));
    else if (variable == "n") c.panel.n = c.panel.m = static_cast<int>(std::lround(value));
    else throw ConfigError("sweep.variable", "unsupported sweep variable '" + variable + "'");
    validate_config(c);
    return c;
}

/// Link budget of one configured scenario.
struct Evaluation {
    RadarSystem radar;
    RisPanel panel;
    SceneGeometry scene;
    LossLedger ledger;
    ComplexMatrix sigma;
    double received_power = 0.0;
    double snr_single = 0.0;
    double snr_coherent = 0.0;
    std::optional<FarFieldWarning> far_field;
};

inline Evaluation evaluate(const ScenarioConfig& cfg) {
    const RadarSystem radar = make_radar(cfg);
    radar.validate();
    const RisPanel panel = make_panel(cfg);
    const SceneGeometry scene = make_scene(cfg);
    const LossLedger ledger = make_ledger(cfg);
    const auto gamma = make_program(cfg, scene, panel);
    ComplexMatrix sigma = scene_sigma(scene, panel, gamma, radar.wavelength());
    Evaluation e{radar, panel, scene, ledger, sigma, 0.0, 0.0, 0.0, std::nullopt};
    e.received_power = received_power(radar, panel, scene, sigma, cfg.scene.rcs);
    e.snr_single = snr_single_pulse(radar, panel, scene, sigma, cfg.scene.rcs, make_noise_form(cfg));
    e.snr_coherent = snr_coherent(e.snr_single, cfg.timeline.pulses, ledger);
    e.far_field = far_field_check(panel, radar.wavelength(), scene.r1(), scene.r2());
    return e;
}

/// Output directory that forgets (deletes) everything written through it
/// unless `commit()` is called.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, const ScenarioConfig& cfg, std::string command)
        : dir_(std::move(dir)), cfg_(cfg), command_(std::move(command)) {}
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet() {
        if (committed_) return;
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

    std::vector<std::string> provenance() const {
        return {"risradar " + std::string(kVersion) + " " + command_, "config_hash " + hex64(config_hash(cfg_)),
                "seed " + std::to_string(cfg_.simulation.seed), "angles in degrees"};
    }

    void csv(const std::string& name, CsvTable table) {
        auto lines = provenance();
        for (auto it = lines.rbegin(); it != lines.rend(); ++it) table.add_comment_front(*it);
        write(name, table.str());
    }

    void write(const std::string& name, std::string_view content) {
        const auto path = dir_ / name;
        write_file_atomic(path, content);
        written_.push_back(path);
    }

    nlohmann::json provenance_json() const {
        return {{"tool", "risradar"}, {"version", kVersion}, {"command", command_},
                {"config_hash", hex64(config_hash(cfg_))}, {"seed", cfg_.simulation.seed}};
    }

    const std::vector<std::filesystem::path>& written() const { return written_; }
    void commit() { committed_ = true; }

private:
    std::filesystem::path dir_;
    const ScenarioConfig& cfg_;
    std::string command_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

namespace commands {

inline double db_or_inf(double lin) { return lin > 0.0 ? linear_to_db(lin) : -std::numeric_limits<double>::infinity(); }

/// Induced pattern over the RIS half-space (1 deg in theta, 2 deg in phi),
/// normalised to (NM)^4, for the configured pointings.
inline void pattern(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const RisPanel panel = make_panel(cfg);
    const SceneGeometry scene = make_scene(cfg);
    const double l = cfg.wavelength();
    const Direction p2 = cfg.panel.steer == "fixed" ? Direction{deg_to_rad(cfg.panel.theta2), deg_to_rad(cfg.panel.phi2)}
                                                    : scene.target_from_ris();
    CsvTable t({"theta_target [deg]", "phi_target [deg]", "pattern_norm [dB]"});
    for (int it = 0; it <= 90; ++it) {
        for (int ip = -178; ip <= 180; ip += 2) {
            const Direction d{deg_to_rad(it), deg_to_rad(ip)};
            const auto off = offsets_from_angles(scene.radar_from_ris(), d, scene.radar_from_ris(), p2, panel, l);
            t.add_row({double(it), double(ip),
                       normalized_pattern_db(induced_pattern_closed_form(off, panel.n(), panel.m()), panel.n(),
                                             panel.m())});
        }
    }
    const std::size_t points = t.size();
    out.csv("pattern.csv", std::move(t));
    const auto bw = beamwidths(panel, l, p2);
    CsvTable s({"n", "m", "phi_bar [deg]", "theta_bar [deg]", "phi_bar_analytic [deg]", "theta_bar_analytic [deg]"});
    const auto an = beamwidths_analytic(panel);
    s.add_row({double(panel.n()), double(panel.m()), rad_to_deg(bw.phi_bar), rad_to_deg(bw.theta_bar),
               rad_to_deg(an.phi_bar), rad_to_deg(an.theta_bar)});
    out.csv("beamwidths.csv", std::move(s));
    log << "pattern: " << points << " points; beamwidths " << rad_to_deg(bw.phi_bar) << " x "
        << rad_to_deg(bw.theta_bar) << " deg\n";
}

inline void snr(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const SweepRange sw = sweep_of(cfg);
    CsvTable t({sw.variable + " [" + (sw.variable == "rcs" ? "m2" : sw.variable == "r1" || sw.variable == "r2" ? "m" : "-") +
                    "]",
                "snr_single [dB]", "snr_c [dB]", "snr_equivalent [dB]", "received_power [dBW]", "far_field [0/1]"});
    for (const double x : sw.values()) {
        const ScenarioConfig c = at_sweep_point(cfg, sw.variable, x);
        const Evaluation e = evaluate(c);
        const auto eq = equivalent_monostatic(e.radar, e.panel, e.scene, e.sigma, e.ledger);
        t.add_row({x, db_or_inf(e.snr_single), db_or_inf(e.snr_coherent),
                   db_or_inf(snr_equivalent_monostatic(eq, e.radar, c.scene.rcs, c.timeline.pulses)),
                   db_or_inf(e.received_power), e.far_field ? 0.0 : 1.0});
    }
    log << "snr: " << t.size() << " points over " << sw.variable << "\n";
    out.csv("snr.csv", std::move(t));
}

inline void pd(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const SweepRange sw = sweep_of(cfg);
    CsvTable t({sw.variable + " [-]", "snr_c [dB]", "pd_sw0 [-]", "pd_sw1 [-]"});
    for (const double x : sw.values()) {
        const ScenarioConfig c = at_sweep_point(cfg, sw.variable, x);
        const Evaluation e = evaluate(c);
        t.add_row({x, db_or_inf(e.snr_coherent), pd_sw0(e.snr_coherent, c.detection.pfa),
                   pd_sw1(e.snr_coherent, c.detection.pfa)});
    }
    out.csv("pd.csv", std::move(t));

    const RadarSystem radar = make_radar(cfg);
    const RisPanel panel = make_panel(cfg);
    const SceneGeometry scene = make_scene(cfg);
    CsvTable r({"model", "pfa [-]", "pd [-]", "max_r2 [m]"});
    for (const auto model : {SwerlingModel::sw0, SwerlingModel::sw1}) {
        const auto range = max_range_for_pd(cfg.detection.pd, {cfg.detection.pfa, model}, radar, panel, scene,
                                            cfg.scene.rcs, cfg.timeline.pulses, make_ledger(cfg));
        r.add_row({model == SwerlingModel::sw0 ? 0.0 : 1.0, cfg.detection.pfa, cfg.detection.pd,
                   range ? *range : std::numeric_limits<double>::quiet_NaN()});
        log << "pd: " << (model == SwerlingModel::sw0 ? "SW0" : "SW1") << " Pd>=" << cfg.detection.pd
            << " up to r2 = " << (range ? format_double(*range) + " m" : std::string("none")) << "\n";
    }
    out.csv("pd_range.csv", std::move(r));
}

inline void scr(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const SweepRange sw = sweep_of(cfg);
    const ClutterEnvironment env = make_clutter(cfg);
    env.validate();
    CsvTable t({sw.variable + " [-]", "phi_bar [deg]", "theta_bar [deg]", "scr_pll [dB]", "scr_bwl [dB]",
                "scr_v [dB]", "regime [0=pll,1=bwl]"});
    for (const double x : sw.values()) {
        const ScenarioConfig c = at_sweep_point(cfg, sw.variable, x);
        const RisPanel panel = make_panel(c);
        const SceneGeometry scene = make_scene(c);
        const auto bw = beamwidths(panel, c.wavelength(), scene.target_from_ris());
        const double r2 = c.scene.r2, tau = c.radar.tau;
        t.add_row({x, rad_to_deg(bw.phi_bar), rad_to_deg(bw.theta_bar),
                   db_or_inf(scr_pulse_length_limited(c.scene.rcs, env, r2, tau, bw.phi_bar)),
                   db_or_inf(scr_beamwidth_limited(c.scene.rcs, env, r2, bw.phi_bar)),
                   db_or_inf(scr_volume(c.scene.rcs, env, r2, tau, bw.phi_bar, bw.theta_bar)),
                   clutter_regime(r2, tau, bw.phi_bar, env.grazing) == ClutterRegime::pulse_length_limited ? 0.0
                                                                                                           : 1.0});
    }
    log << "scr: " << t.size() << " points\n";
    out.csv("scr.csv", std::move(t));
}

inline void timeline(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const DwellPlan plan = make_dwell_plan(cfg);
    CsvTable d({"pulses [-]", "pri [us]", "dwell [ms]", "doppler_resolution [Hz]"});
    for (int np : {8, 16, 32, 64, 128}) {
        d.add_row({double(np), plan.pri * 1e6, dwell_time(np, plan.pri) * 1e3, 1.0 / dwell_time(np, plan.pri)});
    }
    out.csv("dwell.csv", std::move(d));

    DwellInputs in{cfg.radar.tau, cfg.scene.r1, cfg.timeline.unambiguous_range, cfg.timeline.pulses,
                   make_pri_convention(cfg)};
    const ScanSchedule sched = build_scan_schedule(make_sector(cfg), make_panel(cfg), cfg.wavelength(),
                                                   cfg.timeline.max_edge_loss, in, cfg.timeline.subregion1_share);
    CsvTable s({"mode [1/2]", "beam [-]", "theta2 [deg]", "phi2 [deg]", "edge_loss [dB]", "start [ms]",
                "duration [ms]"});
    for (const auto& dw : sched.dwells) {
        s.add_row({dw.mode == ScanMode::subregion1 ? 1.0 : 2.0, double(dw.beam), rad_to_deg(dw.pointing.theta),
                   rad_to_deg(dw.pointing.phi), dw.edge_loss_db, dw.start * 1e3, dw.duration * 1e3});
    }
    out.csv("schedule.csv", std::move(s));
    log << "timeline: PRI " << plan.pri * 1e6 << " us, dwell " << plan.dwell() * 1e3 << " ms, " << sched.beam_count
        << " beams, frame " << sched.frame_time() * 1e3 << " ms\n";
}

/// Setup and truth for the configured scenario's signal-level simulation.
struct SimulationCase {
    SimulationSetup setup;
    std::vector<TargetTruth> targets;
};

inline SimulationCase simulation_case(const ScenarioConfig& cfg) {
    const Evaluation e = evaluate(cfg);
    const DwellPlan plan = make_dwell_plan(cfg);
    const Vec3 toward_ris = (e.scene.ris_position() - e.scene.target_position()) / e.scene.r2();
    const TargetTruth truth = make_target_truth(e.radar, e.panel, e.scene, e.sigma, cfg.scene.rcs,
                                                cfg.scene.radial_speed * toward_ris, e.ledger, plan.pri, 0.0,
                                                cfg.simulation.carrier_phase);
    SimulationSetup s{make_waveform(cfg), plan, cfg.simulation.r2_min, e.radar.noise_density(),
                      e.ledger.propagation(), std::nullopt, cfg.simulation.seed, cfg.simulation.oversample,
                      static_cast<unsigned>(cfg.simulation.threads)};
    if (cfg.simulation.clutter != "off") {
        const ClutterEnvironment env = make_clutter(cfg);
        const auto bw = beamwidths(e.panel, e.radar.wavelength(), e.scene.target_from_ris());
        const double c = cfg.simulation.clutter == "surface"
                             ? surface_clutter_power(e.radar, e.panel, e.scene, e.sigma, env, bw.phi_bar,
                                                     clutter_regime(e.scene.r2(), cfg.radar.tau, bw.phi_bar,
                                                                    env.grazing))
                             : volume_clutter_power(e.radar, e.panel, e.scene, e.sigma, env, bw.phi_bar,
                                                    bw.theta_bar);
        s.clutter = ClutterInjection{c, e.scene.r2(), 64};
    }
    return {std::move(s), {truth}};
}

inline void simulate(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    const SimulationCase sc = simulation_case(cfg);
    const TargetTruth& truth = sc.targets.front();
    const double listen_end = 2.0 * sc.setup.plan.unambiguous_range / kSpeedOfLight;
    const bool truncated = truth.delay < sc.setup.plan.ris_round_trip() ||
                           truth.delay + sc.setup.waveform.duration() > listen_end;
    if (truncated) log << "warning: target echo falls outside the listening window\n";
    if (truth.doppler_ambiguous()) log << "warning: normalised Doppler |nu| >= 0.5 (ambiguous)\n";

    const SimulationResult res = risradar::simulate(sc.setup, sc.targets);
    out.write("D.risd", encode_risd(res.data));

    const Eigen::MatrixXd map = range_doppler_map(res.data, sc.setup.threads);
    CsvTable t({"row [-]", "r2 [m]", "doppler_bin [-]", "doppler [Hz]", "power [W]"});
    const double np = static_cast<double>(map.cols());
    for (Eigen::Index h = 0; h < map.rows(); ++h) {
        for (Eigen::Index k = 0; k < map.cols(); ++k) {
            const double kk = static_cast<double>(k) >= np / 2.0 ? static_cast<double>(k) - np : static_cast<double>(k);
            t.add_row({double(h), res.data.row_range(h), double(k), kk / (np * res.data.pri), map(h, k)});
        }
    }
    out.csv("range_doppler.csv", std::move(t));

    nlohmann::json j;
    j["provenance"] = out.provenance_json();
    j["units"] = {{"range", "m"}, {"delay", "s"}, {"doppler", "Hz"}, {"power", "W"}, {"angle", "deg"}};
    j["target"] = {{"r1", truth.r1},
                   {"r2", truth.r2},
                   {"radial_velocity", truth.radial_velocity},
                   {"doppler", truth.doppler},
                   {"normalized_doppler", truth.normalized_doppler},
                   {"delay", truth.delay},
                   {"one_hop_delay", truth.one_hop_delay},
                   {"amplitude_re", truth.amplitude.real()},
                   {"amplitude_im", truth.amplitude.imag()},
                   {"received_power", truth.received_power},
                   {"expected_row", std::lround((truth.r2 - res.data.r2_min) / res.data.range_bin() *
                                                res.data.oversample)},
                   {"truncated", truncated},
                   {"doppler_ambiguous", truth.doppler_ambiguous()}};
    j["data_matrix"] = {{"rows", res.data.rows()}, {"cols", res.data.cols()}, {"h_max", res.data.h_max},
                        {"r1", res.data.r1},        {"r2_min", res.data.r2_min}, {"range_bin", res.data.range_bin()},
                        {"fs", res.data.fs},        {"bandwidth", res.data.bandwidth}, {"pri", res.data.pri}};
    if (sc.setup.clutter) j["clutter"] = {{"power", sc.setup.clutter->power}, {"r2", sc.setup.clutter->range}};
    out.write("truth.json", j.dump(2) + "\n");
    log << "simulate: D " << res.data.rows() << " x " << res.data.cols() << ", seed " << cfg.simulation.seed << "\n";
}

/// One reproduction check for the report manifest.
struct Check {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  // absolute
    bool pass = false;
};

inline Check make_check(std::string name, double value, double expected, double tolerance) {
    return {std::move(name), value, expected, tolerance, std::abs(value - expected) <= tolerance};
}

inline void report(const ScenarioConfig& cfg, OutputSet& out, std::ostream& log) {
    std::vector<Check> checks;
    const double l = cfg.wavelength();

    const double pri = pri_from_unambiguous_range(10e3, cfg.scene.r1, PriConvention::from_radar);
    const std::pair<int, double> schedule[] = {{8, 0.53}, {16, 1.07}, {32, 2.13}, {64, 4.27}, {128, 8.54}};
    for (const auto& [np, ms] : schedule) {
        checks.push_back(make_check("dwell_ms_np" + std::to_string(np), dwell_time(np, pri) * 1e3, ms, 0.01));
    }
    const std::pair<int, double> ffd[] = {{101, 152.91}, {133, 265.15}, {201, 605.60}};
    for (const auto& [n, ref] : ffd) {
        const RisPanel p(n, n, l / 2.0, l / 2.0);
        checks.push_back(make_check("ffd_m_n" + std::to_string(n), far_field_distance(p, l), ref, 0.005 * ref));
    }
    for (int n : {101, 133, 201}) {
        const RisPanel p(n, n, l / 2.0, l / 2.0);
        const double ref = 0.891 / n;
        checks.push_back(make_check("beamwidth_rad_n" + std::to_string(n), beamwidths(p, l).phi_bar, ref, 0.02 * ref));
    }
    checks.push_back(make_check("scanning_loss_db_45deg", scanning_loss_db(deg_to_rad(45.0)), 4.52, 0.01));
    {
        const double v = scanning_loss_db(deg_to_rad(20.0));
        checks.push_back({"scanning_loss_db_20deg_max", v, 0.8, 0.0, v <= 0.8});
    }
    checks.push_back(make_check("range_resolution_m", kSpeedOfLight / (2.0 * cfg.radar.bandwidth), 15.0, 0.05));
    {
        ScenarioConfig c = cfg;
        c.panel.n = c.panel.m = 133;
        c.timeline.pulses = 64;
        const RadarSystem radar = make_radar(c);
        const RisPanel panel = make_panel(c);
        const SceneGeometry scene = make_scene(c);
        const auto range = [&](SwerlingModel m, double pfa) {
            return max_range_for_pd(0.9, {pfa, m}, radar, panel, scene, c.scene.rcs, 64, make_ledger(c))
                .value_or(std::numeric_limits<double>::quiet_NaN());
        };
        const double sw0 = range(SwerlingModel::sw0, 1e-4);
        checks.push_back(make_check("pd09_range_m_sw0", sw0, 1250.0, 75.0));
        checks.push_back(make_check("pd09_range_shortfall_m_sw1", sw0 - range(SwerlingModel::sw1, 1e-4), 500.0, 100.0));
        checks.push_back(make_check("pd09_range_shift_m_pfa1e-6", sw0 - range(SwerlingModel::sw0, 1e-6), 100.0, 50.0));
    }

    // Curve overlays.
    CsvTable snr_t({"n [-]", "pulses [-]", "r2 [m]", "snr_c [dB]"});
    CsvTable pd_t({"n [-]", "pulses [-]", "pfa [-]", "r2 [m]", "pd_sw0 [-]", "pd_sw1 [-]"});
    CsvTable loss_t({"r1 [m]", "n [-]", "r2 [m]", "lsnr_sum [dB]", "lsnr_rss [dB]"});
    for (int n : {101, 133, 201}) {
        ScenarioConfig c = cfg;
        c.panel.n = c.panel.m = n;
        const Evaluation e = evaluate(c);
        for (int np : {8, 16, 32, 64, 128}) {
            for (double r2 = 100.0; r2 <= 3000.0 + 1e-9; r2 += 10.0) {
                const SceneGeometry s = e.scene.with_target_range(r2);
                const double snr_c =
                    snr_coherent(snr_single_pulse(e.radar, e.panel, s, e.sigma, c.scene.rcs, make_noise_form(c)), np,
                                 e.ledger);
                snr_t.add_row({double(n), double(np), r2, db_or_inf(snr_c)});
                for (double pfa : {1e-4, 1e-6}) {
                    pd_t.add_row({double(n), double(np), pfa, r2, pd_sw0(snr_c, pfa), pd_sw1(snr_c, pfa)});
                }
            }
        }
    }
    for (double r1 : {500.0, 750.0, 1000.0}) {
        for (int n : {101, 133, 201, 301}) {
            ScenarioConfig c = cfg;
            c.panel.n = c.panel.m = n;
            c.scene.r1 = r1;
            const Evaluation e = evaluate(c);
            for (double r2 = 100.0; r2 <= 3000.0 + 1e-9; r2 += 10.0) {
                const SceneGeometry s = e.scene.with_target_range(r2);
                const auto sum = snr_loss_vs_clairvoyant(e.radar, e.panel, s, e.sigma, c.scene.rcs, e.ledger,
                                                         ClairvoyantRange::sum);
                const auto rss = snr_loss_vs_clairvoyant(e.radar, e.panel, s, e.sigma, c.scene.rcs, e.ledger,
                                                         ClairvoyantRange::root_sum_square);
                loss_t.add_row({r1, double(n), r2, sum.loss_db, rss.loss_db});
            }
        }
    }
    out.csv("report_snr_vs_r2.csv", std::move(snr_t));
    out.csv("report_pd_vs_r2.csv", std::move(pd_t));
    out.csv("report_lsnr_vs_r2.csv", std::move(loss_t));

    nlohmann::json m;
    m["provenance"] = out.provenance_json();
    bool all = true;
    for (const auto& c : checks) {
        m["checks"].push_back(
            {{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        all = all && c.pass;
        log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (expected " << c.expected
            << (c.tolerance > 0.0 ? " +/- " + format_double(c.tolerance) : std::string(" bound")) << ")\n";
    }
    m["all_pass"] = all;
    out.write("manifest.json", m.dump(2) + "\n");
}

}  // namespace commands

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"pattern", "snr", "pd", "scr", "timeline", "simulate", "report"};
    return names;
}

/// Output directory: the environment override wins over `requested`.
inline std::filesystem::path resolve_output_dir(const std::filesystem::path& requested) {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return requested;
}

/// Runs one subcommand; on any failure the files it wrote are removed.
inline int run_subcommand(const std::string& name, const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    try {
        validate_config(cfg);
        OutputSet out(resolve_output_dir(out_dir), cfg, name);
        if (name == "pattern") commands::pattern(cfg, out, log);
        else if (name == "snr") commands::snr(cfg, out, log);
        else if (name == "pd") commands::pd(cfg, out, log);
        else if (name == "scr") commands::scr(cfg, out, log);
        else if (name == "timeline") commands::timeline(cfg, out, log);
        else if (name == "simulate") commands::simulate(cfg, out, log);
        else if (name == "report") commands::report(cfg, out, log);
        else throw ConfigError("command", "unknown subcommand '" + name + "'");
        out.write("provenance_" + name + ".txt", emit_config(cfg));
        out.commit();
        return exit_ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation_failure;
    }
}

}  // namespace risradar
