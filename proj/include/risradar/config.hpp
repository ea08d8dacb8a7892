#pragma once

// Scenario configuration: parsing, validation and canonical emission.
//
// Grammar (one item per line):
//   # comment            ; comment
//   [section]
//   key = value [unit]   # inside a section
//   section.key = value [unit]
// Blank lines are ignored; trailing comments start with '#'. Quantities take
// an optional unit (the canonical unit when omitted). Decibel quantities stay
// in dB here and are converted to linear when the model objects are built.

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "risradar/clutter.hpp"
#include "risradar/constants.hpp"
#include "risradar/data_io.hpp"
#include "risradar/detection.hpp"
#include "risradar/echo_sim.hpp"
#include "risradar/geometry.hpp"
#include "risradar/link_budget.hpp"
#include "risradar/timeline.hpp"

namespace risradar {

/// Configuration problem; `path()` is the offending section.key (or "line N").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Element spacing either in wavelengths or in metres.
struct Spacing {
    double value = 0.5;
    bool wavelengths = true;

    double metres(double lambda0) const { return wavelengths ? value * lambda0 : value; }
    bool operator==(const Spacing&) const = default;
};

struct ScenarioConfig {
    struct Scene {
        double r1 = 1000.0;            // m
        double radar_theta = 30.0;     // deg, radar seen from the RIS
        double radar_phi = 20.0;       // deg
        double r2 = 1000.0;            // m
        double target_theta = 0.0;     // deg, target seen from the RIS
        double target_phi = 0.0;       // deg
        double rcs = 0.02;             // m^2
        double radial_speed = 0.0;     // m/s, positive closing on the RIS
        bool operator==(const Scene&) const = default;
    } scene;
    struct Panel {
        int n = 133;
        int m = 133;
        Spacing dx;
        Spacing dy;
        double efficiency = 0.8;
        double patch_gain = 4.0;       // dB
        double pattern_exponent = 1.5;
        std::string steer = "target";  // target | fixed
        double theta2 = 0.0;           // deg, used when steer = fixed
        double phi2 = 0.0;             // deg
        bool operator==(const Panel&) const = default;
    } panel;
    struct Radar {
        double f0 = 10e9;              // Hz
        double peak_power = 26.0;      // dBW
        double tx_gain = 38.0;         // dB
        double pattern_gain = 0.0;     // dB, F^R toward the RIS
        double bandwidth = 10e6;       // Hz
        double tau = 1.5e-6;           // s
        double noise_figure = 2.5;     // dB
        double temperature = kStandardTemperature;  // K
        std::string snr_form = "energy";  // energy | bandwidth
        bool operator==(const Radar&) const = default;
    } radar;
    struct Losses {
        double transmit = 6.0;         // dB (aggregate L_tot)
        double atmospheric = 0.0;      // dB, both hops
        double receive = 0.0;          // dB
        double processing = 0.0;       // dB
        double ris = 0.0;              // dB
        bool operator==(const Losses&) const = default;
    } losses;
    struct Clutter {
        double sigma0 = -20.0;         // dB (m^2/m^2)
        double gamma0 = -60.0;         // dB (m^2/m^3)
        double grazing = 5.0;          // deg
        bool operator==(const Clutter&) const = default;
    } clutter;
    struct Detection {
        double pfa = 1e-4;
        std::string model = "sw0";     // sw0 | sw1
        double pd = 0.9;               // target Pd for range queries
        bool operator==(const Detection&) const = default;
    } detection;
    struct Timeline {
        int pulses = 64;
        double unambiguous_range = 10e3;  // m
        std::string pri_convention = "from_radar";  // from_radar | from_ris
        double max_edge_loss = 3.0;    // dB
        double sector_theta_min = 0.0; // deg
        double sector_theta_max = 30.0;
        double sector_phi_min = -30.0;
        double sector_phi_max = 30.0;
        double subregion1_share = 0.0;
        bool operator==(const Timeline&) const = default;
    } timeline;
    struct Simulation {
        std::uint64_t seed = 1;
        double fs = 20e6;              // Hz
        std::string waveform = "lfm";  // lfm | unmodulated
        double min_oversampling = 2.0;
        double r2_min = 0.0;           // m
        int oversample = 1;
        int threads = 0;
        std::string clutter = "off";   // off | surface | volume
        bool carrier_phase = true;
        bool operator==(const Simulation&) const = default;
    } simulation;
    struct Sweep {
        std::string variable = "r2";   // r2 | r1 | pulses | n | rcs
        double start = 100.0;
        double stop = 3000.0;
        double step = 10.0;
        bool operator==(const Sweep&) const = default;
    } sweep;

    bool operator==(const ScenarioConfig&) const = default;

    double wavelength() const { return wavelength_from_frequency(radar.f0); }
};

namespace config_detail {

enum class Kind { count, real, seed, boolean, choice, length, frequency, time, db, power_db, angle, area, speed,
                  temperature, spacing };

struct UnitScale {
    std::string_view unit;
    double scale;
};

inline const std::vector<UnitScale>& units_for(Kind k) {
    static const std::vector<UnitScale> length{{"m", 1.0}, {"km", 1e3}, {"cm", 1e-2}, {"mm", 1e-3}};
    static const std::vector<UnitScale> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::vector<UnitScale> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
    static const std::vector<UnitScale> db{{"dB", 1.0}};
    static const std::vector<UnitScale> angle{{"deg", 1.0}, {"rad", 180.0 / kPi}};
    static const std::vector<UnitScale> area{{"m2", 1.0}};
    static const std::vector<UnitScale> speed{{"m/s", 1.0}, {"km/h", 1.0 / 3.6}};
    static const std::vector<UnitScale> temp{{"K", 1.0}};
    static const std::vector<UnitScale> none{};
    switch (k) {
        case Kind::length: return length;
        case Kind::frequency: return freq;
        case Kind::time: return time;
        case Kind::db: return db;
        case Kind::angle: return angle;
        case Kind::area: return area;
        case Kind::speed: return speed;
        case Kind::temperature: return temp;
        default: return none;
    }
}

inline std::string_view canonical_unit(Kind k) {
    switch (k) {
        case Kind::power_db: return "dBW";
        case Kind::spacing: return "lambda";
        default: {
            const auto& u = units_for(k);
            return u.empty() ? std::string_view{} : u.front().unit;
        }
    }
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct NumberWithUnit {
    double value = 0.0;
    std::string unit;
};

inline NumberWithUnit split_number(const std::string& path, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{}) throw ConfigError(path, "expected a number, got '" + std::string(text) + "'");
    return {v, std::string(trim(std::string_view(res.ptr, text.data() + text.size() - res.ptr)))};
}

inline double scaled(const std::string& path, Kind k, std::string_view text) {
    const auto [v, unit] = split_number(path, text);
    if (!std::isfinite(v)) throw ConfigError(path, "value must be finite");
    const auto& table = units_for(k);
    if (unit.empty()) return v;
    for (const auto& u : table) {
        if (u.unit == unit) return v * u.scale;
    }
    if (k == Kind::time && unit == "\xC2\xB5s") return v * 1e-6;
    std::string allowed;
    for (const auto& u : table) allowed += (allowed.empty() ? "" : ", ") + std::string(u.unit);
    throw ConfigError(path, "unknown unit '" + unit + "'" + (allowed.empty() ? " (unitless)" : " (expected " + allowed + ")"));
}

struct Field {
    std::string section;
    std::string key;
    Kind kind;
    std::function<void(ScenarioConfig&, const std::string& path, std::string_view value)> set;
    std::function<std::string(const ScenarioConfig&)> get;

    std::string path() const { return section + "." + key; }
};

template <typename Member>
Field quantity(std::string section, std::string key, Kind kind, Member member) {
    Field f{std::move(section), std::move(key), kind, {}, {}};
    f.set = [kind, member](ScenarioConfig& c, const std::string& path, std::string_view text) {
        double& target = std::invoke(member, c);
        if (kind == Kind::power_db) {
            const auto [v, unit] = split_number(path, text);
            if (unit.empty() || unit == "dBW") target = v;
            else if (unit == "dBm") target = v - 30.0;
            else if (unit == "W" || unit == "kW" || unit == "mW") {
                const double w = v * (unit == "kW" ? 1e3 : unit == "mW" ? 1e-3 : 1.0);
                if (!(w > 0.0)) throw ConfigError(path, "power must be positive");
                target = linear_to_db(w);
            } else {
                throw ConfigError(path, "unknown unit '" + unit + "' (expected dBW, dBm, W, kW, mW)");
            }
            if (!std::isfinite(target)) throw ConfigError(path, "value must be finite");
            return;
        }
        target = scaled(path, kind, text);
    };
    f.get = [kind, member](const ScenarioConfig& c) {
        const double v = std::invoke(member, const_cast<ScenarioConfig&>(c));
        const auto unit = canonical_unit(kind);
        return format_double(v) + (unit.empty() ? "" : " " + std::string(unit));
    };
    return f;
}

template <typename Member>
Field integer(std::string section, std::string key, Member member) {
    Field f{std::move(section), std::move(key), Kind::count, {}, {}};
    f.set = [member](ScenarioConfig& c, const std::string& path, std::string_view text) {
        text = trim(text);
        int v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw ConfigError(path, "expected an integer, got '" + std::string(text) + "'");
        }
        std::invoke(member, c) = v;
    };
    f.get = [member](const ScenarioConfig& c) {
        return std::to_string(std::invoke(member, const_cast<ScenarioConfig&>(c)));
    };
    return f;
}

template <typename Member>
Field choice(std::string section, std::string key, std::vector<std::string> options, Member member) {
    Field f{std::move(section), std::move(key), Kind::choice, {}, {}};
    f.set = [options, member](ScenarioConfig& c, const std::string& path, std::string_view text) {
        const std::string v(trim(text));
        for (const auto& o : options) {
            if (o == v) {
                std::invoke(member, c) = v;
                return;
            }
        }
        std::string allowed;
        for (const auto& o : options) allowed += (allowed.empty() ? "" : " | ") + o;
        throw ConfigError(path, "'" + v + "' is not one of " + allowed);
    };
    f.get = [member](const ScenarioConfig& c) { return std::invoke(member, const_cast<ScenarioConfig&>(c)); };
    return f;
}

template <typename Member>
Field boolean(std::string section, std::string key, Member member) {
    Field f{std::move(section), std::move(key), Kind::boolean, {}, {}};
    f.set = [member](ScenarioConfig& c, const std::string& path, std::string_view text) {
        const std::string v(trim(text));
        if (v == "true" || v == "on" || v == "yes") std::invoke(member, c) = true;
        else if (v == "false" || v == "off" || v == "no") std::invoke(member, c) = false;
        else throw ConfigError(path, "expected true or false, got '" + v + "'");
    };
    f.get = [member](const ScenarioConfig& c) {
        return std::string(std::invoke(member, const_cast<ScenarioConfig&>(c)) ? "true" : "false");
    };
    return f;
}

template <typename Member>
Field spacing(std::string section, std::string key, Member member) {
    Field f{std::move(section), std::move(key), Kind::spacing, {}, {}};
    f.set = [member](ScenarioConfig& c, const std::string& path, std::string_view text) {
        const auto [v, unit] = split_number(path, text);
        Spacing& s = std::invoke(member, c);
        if (unit.empty() || unit == "lambda") s = {v, true};
        else s = {scaled(path, Kind::length, text), false};
    };
    f.get = [member](const ScenarioConfig& c) {
        const Spacing& s = std::invoke(member, const_cast<ScenarioConfig&>(c));
        return format_double(s.value) + (s.wavelengths ? " lambda" : " m");
    };
    return f;
}

inline Field seed_field() {
    Field f{"simulation", "seed", Kind::seed, {}, {}};
    f.set = [](ScenarioConfig& c, const std::string& path, std::string_view text) {
        text = trim(text);
        std::uint64_t v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw ConfigError(path, "expected a nonnegative integer seed");
        }
        c.simulation.seed = v;
    };
    f.get = [](const ScenarioConfig& c) { return std::to_string(c.simulation.seed); };
    return f;
}

inline const std::vector<Field>& fields() {
    using C = ScenarioConfig;
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        t.push_back(quantity("scene", "r1", Kind::length, [](C& c) -> double& { return c.scene.r1; }));
        t.push_back(quantity("scene", "radar_theta", Kind::angle, [](C& c) -> double& { return c.scene.radar_theta; }));
        t.push_back(quantity("scene", "radar_phi", Kind::angle, [](C& c) -> double& { return c.scene.radar_phi; }));
        t.push_back(quantity("scene", "r2", Kind::length, [](C& c) -> double& { return c.scene.r2; }));
        t.push_back(quantity("scene", "target_theta", Kind::angle, [](C& c) -> double& { return c.scene.target_theta; }));
        t.push_back(quantity("scene", "target_phi", Kind::angle, [](C& c) -> double& { return c.scene.target_phi; }));
        t.push_back(quantity("scene", "rcs", Kind::area, [](C& c) -> double& { return c.scene.rcs; }));
        t.push_back(quantity("scene", "radial_speed", Kind::speed, [](C& c) -> double& { return c.scene.radial_speed; }));

        t.push_back(integer("panel", "n", [](C& c) -> int& { return c.panel.n; }));
        t.push_back(integer("panel", "m", [](C& c) -> int& { return c.panel.m; }));
        t.push_back(spacing("panel", "dx", [](C& c) -> Spacing& { return c.panel.dx; }));
        t.push_back(spacing("panel", "dy", [](C& c) -> Spacing& { return c.panel.dy; }));
        t.push_back(quantity("panel", "efficiency", Kind::real, [](C& c) -> double& { return c.panel.efficiency; }));
        t.push_back(quantity("panel", "patch_gain", Kind::db, [](C& c) -> double& { return c.panel.patch_gain; }));
        t.push_back(quantity("panel", "pattern_exponent", Kind::real,
                             [](C& c) -> double& { return c.panel.pattern_exponent; }));
        t.push_back(choice("panel", "steer", {"target", "fixed"}, [](C& c) -> std::string& { return c.panel.steer; }));
        t.push_back(quantity("panel", "theta2", Kind::angle, [](C& c) -> double& { return c.panel.theta2; }));
        t.push_back(quantity("panel", "phi2", Kind::angle, [](C& c) -> double& { return c.panel.phi2; }));

        t.push_back(quantity("radar", "f0", Kind::frequency, [](C& c) -> double& { return c.radar.f0; }));
        t.push_back(quantity("radar", "peak_power", Kind::power_db, [](C& c) -> double& { return c.radar.peak_power; }));
        t.push_back(quantity("radar", "tx_gain", Kind::db, [](C& c) -> double& { return c.radar.tx_gain; }));
        t.push_back(quantity("radar", "pattern_gain", Kind::db, [](C& c) -> double& { return c.radar.pattern_gain; }));
        t.push_back(quantity("radar", "bandwidth", Kind::frequency, [](C& c) -> double& { return c.radar.bandwidth; }));
        t.push_back(quantity("radar", "tau", Kind::time, [](C& c) -> double& { return c.radar.tau; }));
        t.push_back(quantity("radar", "noise_figure", Kind::db, [](C& c) -> double& { return c.radar.noise_figure; }));
        t.push_back(quantity("radar", "temperature", Kind::temperature,
                             [](C& c) -> double& { return c.radar.temperature; }));
        t.push_back(choice("radar", "snr_form", {"energy", "bandwidth"},
                           [](C& c) -> std::string& { return c.radar.snr_form; }));

        t.push_back(quantity("losses", "transmit", Kind::db, [](C& c) -> double& { return c.losses.transmit; }));
        t.push_back(quantity("losses", "atmospheric", Kind::db, [](C& c) -> double& { return c.losses.atmospheric; }));
        t.push_back(quantity("losses", "receive", Kind::db, [](C& c) -> double& { return c.losses.receive; }));
        t.push_back(quantity("losses", "processing", Kind::db, [](C& c) -> double& { return c.losses.processing; }));
        t.push_back(quantity("losses", "ris", Kind::db, [](C& c) -> double& { return c.losses.ris; }));

        t.push_back(quantity("clutter", "sigma0", Kind::db, [](C& c) -> double& { return c.clutter.sigma0; }));
        t.push_back(quantity("clutter", "gamma0", Kind::db, [](C& c) -> double& { return c.clutter.gamma0; }));
        t.push_back(quantity("clutter", "grazing", Kind::angle, [](C& c) -> double& { return c.clutter.grazing; }));

        t.push_back(quantity("detection", "pfa", Kind::real, [](C& c) -> double& { return c.detection.pfa; }));
        t.push_back(choice("detection", "model", {"sw0", "sw1"}, [](C& c) -> std::string& { return c.detection.model; }));
        t.push_back(quantity("detection", "pd", Kind::real, [](C& c) -> double& { return c.detection.pd; }));

        t.push_back(integer("timeline", "pulses", [](C& c) -> int& { return c.timeline.pulses; }));
        t.push_back(quantity("timeline", "unambiguous_range", Kind::length,
                             [](C& c) -> double& { return c.timeline.unambiguous_range; }));
        t.push_back(choice("timeline", "pri_convention", {"from_radar", "from_ris"},
                           [](C& c) -> std::string& { return c.timeline.pri_convention; }));
        t.push_back(quantity("timeline", "max_edge_loss", Kind::db,
                             [](C& c) -> double& { return c.timeline.max_edge_loss; }));
        t.push_back(quantity("timeline", "sector_theta_min", Kind::angle,
                             [](C& c) -> double& { return c.timeline.sector_theta_min; }));
        t.push_back(quantity("timeline", "sector_theta_max", Kind::angle,
                             [](C& c) -> double& { return c.timeline.sector_theta_max; }));
        t.push_back(quantity("timeline", "sector_phi_min", Kind::angle,
                             [](C& c) -> double& { return c.timeline.sector_phi_min; }));
        t.push_back(quantity("timeline", "sector_phi_max", Kind::angle,
                             [](C& c) -> double& { return c.timeline.sector_phi_max; }));
        t.push_back(quantity("timeline", "subregion1_share", Kind::real,
                             [](C& c) -> double& { return c.timeline.subregion1_share; }));

        t.push_back(seed_field());
        t.push_back(quantity("simulation", "fs", Kind::frequency, [](C& c) -> double& { return c.simulation.fs; }));
        t.push_back(choice("simulation", "waveform", {"lfm", "unmodulated"},
                           [](C& c) -> std::string& { return c.simulation.waveform; }));
        t.push_back(quantity("simulation", "min_oversampling", Kind::real,
                             [](C& c) -> double& { return c.simulation.min_oversampling; }));
        t.push_back(quantity("simulation", "r2_min", Kind::length, [](C& c) -> double& { return c.simulation.r2_min; }));
        t.push_back(integer("simulation", "oversample", [](C& c) -> int& { return c.simulation.oversample; }));
        t.push_back(integer("simulation", "threads", [](C& c) -> int& { return c.simulation.threads; }));
        t.push_back(choice("simulation", "clutter", {"off", "surface", "volume"},
                           [](C& c) -> std::string& { return c.simulation.clutter; }));
        t.push_back(boolean("simulation", "carrier_phase", [](C& c) -> bool& { return c.simulation.carrier_phase; }));

        t.push_back(choice("sweep", "variable", {"r2", "r1", "pulses", "n", "rcs"},
                           [](C& c) -> std::string& { return c.sweep.variable; }));
        t.push_back(quantity("sweep", "start", Kind::real, [](C& c) -> double& { return c.sweep.start; }));
        t.push_back(quantity("sweep", "stop", Kind::real, [](C& c) -> double& { return c.sweep.stop; }));
        t.push_back(quantity("sweep", "step", Kind::real, [](C& c) -> double& { return c.sweep.step; }));
        return t;
    }();
    return table;
}

inline const Field* find_field(std::string_view section, std::string_view key) {
    for (const auto& f : fields()) {
        if (f.section == section && f.key == key) return &f;
    }
    return nullptr;
}

}  // namespace config_detail

/// Invariant checks; the first violation is reported with its section.key.
inline void validate_config(const ScenarioConfig& c) {
    const auto require = [](bool ok, const char* path, const std::string& what) {
        if (!ok) throw ConfigError(path, what);
    };
    require(c.scene.r1 > 0.0, "scene.r1", "must be positive");
    require(c.scene.r2 > 0.0, "scene.r2", "must be positive");
    require(c.scene.radar_theta >= 0.0 && c.scene.radar_theta <= 90.0, "scene.radar_theta", "must lie in [0, 90] deg");
    require(c.scene.target_theta >= 0.0 && c.scene.target_theta <= 90.0, "scene.target_theta",
            "must lie in [0, 90] deg");
    require(c.scene.radar_phi > -180.0 && c.scene.radar_phi <= 180.0, "scene.radar_phi", "must lie in (-180, 180] deg");
    require(c.scene.target_phi > -180.0 && c.scene.target_phi <= 180.0, "scene.target_phi",
            "must lie in (-180, 180] deg");
    require(c.scene.rcs >= 0.0, "scene.rcs", "must be nonnegative");

    require(c.panel.n >= 1 && c.panel.n % 2 == 1, "panel.n", "must be a positive odd integer");
    require(c.panel.m >= 1 && c.panel.m % 2 == 1, "panel.m", "must be a positive odd integer");
    require(c.panel.dx.value > 0.0, "panel.dx", "must be positive");
    require(c.panel.dy.value > 0.0, "panel.dy", "must be positive");
    require(c.panel.efficiency > 0.0 && c.panel.efficiency <= 1.0, "panel.efficiency", "must lie in (0, 1]");
    require(c.panel.pattern_exponent > 0.0, "panel.pattern_exponent", "must be positive");
    require(c.panel.theta2 >= 0.0 && c.panel.theta2 <= 90.0, "panel.theta2", "must lie in [0, 90] deg");
    require(c.panel.phi2 > -180.0 && c.panel.phi2 <= 180.0, "panel.phi2", "must lie in (-180, 180] deg");

    require(c.radar.f0 > 0.0, "radar.f0", "must be positive");
    require(c.radar.bandwidth > 0.0, "radar.bandwidth", "must be positive");
    require(c.radar.tau > 0.0, "radar.tau", "must be positive");
    require(c.radar.bandwidth * c.radar.tau >= 1.0 - 1e-12, "radar.bandwidth", "time-bandwidth product B*tau below 1");
    require(c.radar.noise_figure >= 0.0, "radar.noise_figure", "must be >= 0 dB");
    require(c.radar.temperature > 0.0, "radar.temperature", "must be positive");

    require(c.losses.transmit >= 0.0, "losses.transmit", "must be >= 0 dB");
    require(c.losses.atmospheric >= 0.0, "losses.atmospheric", "must be >= 0 dB");
    require(c.losses.receive >= 0.0, "losses.receive", "must be >= 0 dB");
    require(c.losses.processing >= 0.0, "losses.processing", "must be >= 0 dB");
    require(c.losses.ris >= 0.0, "losses.ris", "must be >= 0 dB");

    require(c.clutter.grazing >= 0.0 && c.clutter.grazing < 90.0, "clutter.grazing", "must lie in [0, 90) deg");

    require(c.detection.pfa > 0.0 && c.detection.pfa < 1.0, "detection.pfa", "must lie in (0, 1)");
    require(c.detection.pd > c.detection.pfa && c.detection.pd < 1.0, "detection.pd", "must lie in (pfa, 1)");

    require(c.timeline.pulses >= 1, "timeline.pulses", "must be >= 1");
    require(c.timeline.unambiguous_range > 0.0, "timeline.unambiguous_range", "must be positive");
    require(c.timeline.max_edge_loss > 0.0, "timeline.max_edge_loss", "must be positive");
    require(c.timeline.sector_theta_min >= 0.0 && c.timeline.sector_theta_max <= 90.0 &&
                c.timeline.sector_theta_min <= c.timeline.sector_theta_max,
            "timeline.sector_theta_max", "elevation sector must satisfy 0 <= min <= max <= 90 deg");
    require(c.timeline.sector_phi_min <= c.timeline.sector_phi_max, "timeline.sector_phi_max",
            "azimuth sector must satisfy min <= max");
    require(c.timeline.subregion1_share >= 0.0 && c.timeline.subregion1_share < 1.0, "timeline.subregion1_share",
            "must lie in [0, 1)");

    require(c.simulation.fs > 0.0, "simulation.fs", "must be positive");
    require(c.simulation.min_oversampling > 0.0, "simulation.min_oversampling", "must be positive");
    require(c.simulation.r2_min >= 0.0, "simulation.r2_min", "must be nonnegative");
    require(c.simulation.oversample >= 1, "simulation.oversample", "must be >= 1");
    require(c.simulation.threads >= 0, "simulation.threads", "must be >= 0");

    require(c.sweep.step > 0.0, "sweep.step", "must be positive");
    require(c.sweep.stop >= c.sweep.start, "sweep.stop", "must be >= sweep.start");
}

/// Applies one `path = value` assignment (path is section.key).
inline void set_config_value(ScenarioConfig& c, std::string_view path, std::string_view value) {
    const auto dot = path.find('.');
    const std::string p(path);
    if (dot == std::string_view::npos) throw ConfigError(p, "expected section.key");
    const auto* f = config_detail::find_field(path.substr(0, dot), path.substr(dot + 1));
    if (!f) throw ConfigError(p, "unknown key");
    f->set(c, p, value);
}

/// Parses and validates; omitted keys keep the reference-scenario defaults.
inline ScenarioConfig parse_config(std::string_view text) {
    using config_detail::trim;
    ScenarioConfig c;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == ';') continue;
        const std::string where = "line " + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const auto& f : config_detail::fields()) known = known || f.section == section;
            if (!known) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where, "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where, "missing key");
        if (value.empty()) throw ConfigError(key.find('.') == std::string::npos ? section + "." + key : key, "missing value");
        if (key.find('.') != std::string::npos) set_config_value(c, key, value);
        else if (section.empty()) throw ConfigError(key, "key outside any section");
        else set_config_value(c, section + "." + key, value);
    }
    validate_config(c);
    return c;
}

/// Canonical text form; parse_config(emit_config(c)) == c.
inline std::string emit_config(const ScenarioConfig& c) {
    std::string out;
    std::string section;
    for (const auto& f : config_detail::fields()) {
        if (f.section != section) {
            out += (section.empty() ? "" : "\n") + ("[" + f.section + "]\n");
            section = f.section;
        }
        out += f.key + " = " + f.get(c) + "\n";
    }
    return out;
}

inline std::uint64_t config_hash(const ScenarioConfig& c) { return fnv1a64(emit_config(c)); }

// Model objects built from a configuration. dB -> linear happens here.

inline RadarSystem make_radar(const ScenarioConfig& c) {
    RadarSystem r;
    r.peak_power = db_to_linear(c.radar.peak_power);
    r.tx_gain = db_to_linear(c.radar.tx_gain);
    r.carrier = c.radar.f0;
    r.bandwidth = c.radar.bandwidth;
    r.pulse_length = c.radar.tau;
    r.noise_figure = db_to_linear(c.radar.noise_figure);
    r.temperature = c.radar.temperature;
    const double fr = db_to_linear(c.radar.pattern_gain);
    r.pattern = [fr](const Direction&) { return fr; };
    return r;
}

inline RisPanel make_panel(const ScenarioConfig& c) {
    const double l = c.wavelength();
    return RisPanel(c.panel.n, c.panel.m, c.panel.dx.metres(l), c.panel.dy.metres(l), c.panel.efficiency,
                    db_to_linear(c.panel.patch_gain), c.panel.pattern_exponent);
}

inline Direction radar_direction(const ScenarioConfig& c) {
    return {deg_to_rad(c.scene.radar_theta), deg_to_rad(c.scene.radar_phi)};
}

inline Direction target_direction(const ScenarioConfig& c) {
    return {deg_to_rad(c.scene.target_theta), deg_to_rad(c.scene.target_phi)};
}

inline SceneGeometry make_scene(const ScenarioConfig& c) {
    return SceneGeometry::from_polar(c.scene.r1, radar_direction(c), c.scene.r2, target_direction(c));
}

inline LossLedger make_ledger(const ScenarioConfig& c) {
    LossLedger l;
    l.transmit = db_to_linear(c.losses.transmit);
    l.atmospheric1 = db_to_linear(c.losses.atmospheric);
    l.receive = db_to_linear(c.losses.receive);
    l.processing = db_to_linear(c.losses.processing);
    l.ris = db_to_linear(c.losses.ris);
    return l;
}

inline DetectionSpec make_detection(const ScenarioConfig& c) {
    return {c.detection.pfa, c.detection.model == "sw1" ? SwerlingModel::sw1 : SwerlingModel::sw0};
}

inline ClutterEnvironment make_clutter(const ScenarioConfig& c) {
    return {db_to_linear(c.clutter.sigma0), db_to_linear(c.clutter.gamma0), deg_to_rad(c.clutter.grazing)};
}

inline PriConvention make_pri_convention(const ScenarioConfig& c) {
    return c.timeline.pri_convention == "from_ris" ? PriConvention::from_ris : PriConvention::from_radar;
}

inline DwellPlan make_dwell_plan(const ScenarioConfig& c) {
    return build_dwell_plan(c.radar.tau, c.scene.r1, c.timeline.unambiguous_range, c.timeline.pulses,
                            make_pri_convention(c));
}

inline AngularSector make_sector(const ScenarioConfig& c) {
    return {deg_to_rad(c.timeline.sector_theta_min), deg_to_rad(c.timeline.sector_theta_max),
            deg_to_rad(c.timeline.sector_phi_min), deg_to_rad(c.timeline.sector_phi_max)};
}

inline PulseWaveform make_waveform(const ScenarioConfig& c) {
    return PulseWaveform(c.simulation.waveform == "unmodulated" ? PulseKind::unmodulated : PulseKind::lfm,
                         c.radar.tau, c.radar.bandwidth, c.simulation.fs, c.simulation.min_oversampling);
}

inline NoiseForm make_noise_form(const ScenarioConfig& c) {
    return c.radar.snr_form == "bandwidth" ? NoiseForm::bandwidth : NoiseForm::pulse_length;
}

/// Reflection program for the configured scene: sub-region-1 pointing at the
/// radar and sub-region-2 pointing at the target (or the fixed pointing).
inline ReflectionProgram make_program(const ScenarioConfig& c, const SceneGeometry& scene, const RisPanel& panel) {
    const Direction p2 = c.panel.steer == "fixed" ? Direction{deg_to_rad(c.panel.theta2), deg_to_rad(c.panel.phi2)}
                                                  : scene.target_from_ris();
    return phase_matched_program(scene.radar_from_ris(), p2, panel, c.wavelength());
}

}  // namespace risradar
