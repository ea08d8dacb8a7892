#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "risradar/config.hpp"
#include "risradar/data_io.hpp"

using namespace risradar;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& tag) {
    const auto d = fs::temp_directory_path() / ("risradar_io_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(d);
    return d;
}

DataMatrix random_matrix(int rows, int cols) {
    DataMatrix dm;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    dm.d.resize(rows, cols);
    for (int h = 0; h < rows; ++h)
        for (int l = 0; l < cols; ++l) dm.d(h, l) = {g(rng), g(rng)};
    dm.fs = 20e6;
    dm.bandwidth = 10e6;
    dm.pri = 66.71e-6;
    return dm;
}
}  // namespace

TEST(Risd, RoundTripIsBitExact) {
    const DataMatrix dm = random_matrix(37, 5);
    const RisdFile f = decode_risd(encode_risd(dm));
    EXPECT_EQ(f.version, 1);
    EXPECT_EQ(f.fs, dm.fs);
    EXPECT_EQ(f.bandwidth, dm.bandwidth);
    EXPECT_EQ(f.pri, dm.pri);
    EXPECT_TRUE(f.d == dm.d);
}

TEST(Risd, HeaderLayoutIsLittleEndian) {
    const DataMatrix dm = random_matrix(2, 3);
    const std::string b = encode_risd(dm);
    ASSERT_EQ(b.size(), 4u + 2 + 8 + 8 + 3 * 8 + 2 * 3 * 16);
    EXPECT_EQ(b.substr(0, 4), "RISD");
    EXPECT_EQ(static_cast<unsigned char>(b[4]), 1);
    EXPECT_EQ(static_cast<unsigned char>(b[5]), 0);
    EXPECT_EQ(static_cast<unsigned char>(b[6]), 2);
    EXPECT_EQ(static_cast<unsigned char>(b[14]), 3);
    double re = 0.0;
    std::memcpy(&re, b.data() + 46, 8);  // first sample, host assumed little-endian
    EXPECT_EQ(re, dm.d(0, 0).real());
}

TEST(Risd, RejectsCorruptInput) {
    std::string b = encode_risd(random_matrix(2, 2));
    EXPECT_THROW(decode_risd(b.substr(0, b.size() - 1)), std::runtime_error);
    b[0] = 'X';
    EXPECT_THROW(decode_risd(b), std::runtime_error);
}

TEST(Csv, ShortestDecimalRoundTrips) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> e(-300.0, 300.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::pow(10.0, e(rng)) * (i % 2 ? -1.0 : 1.0);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    CsvTable t({"r2 [m]", "snr [dB]"});
    t.add_comment("seed=1");
    t.add_row({1000.0, 0.1});
    EXPECT_EQ(t.str(), "# seed=1\nr2 [m],snr [dB]\n1000,0.1\n");
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Files, AtomicWriteReplacesContent) {
    const auto d = temp_dir("atomic");
    const auto p = d / "out.txt";
    write_file_atomic(p, "first");
    write_file_atomic(p, "second");
    EXPECT_EQ(read_file(p), "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++entries;
    EXPECT_EQ(entries, 1);
    fs::remove_all(d);
}

TEST(Config, EmptyInputGivesDefaults) {
    const ScenarioConfig c = parse_config("");
    EXPECT_EQ(c, ScenarioConfig{});
    EXPECT_NO_THROW(validate_config(c));
    EXPECT_EQ(c.panel.n, 133);
    EXPECT_EQ(c.timeline.pulses, 64);
}

TEST(Config, EmitParseRoundTrip) {
    ScenarioConfig c;
    c.scene.r2 = 1234.5;
    c.panel.n = 101;
    c.panel.steer = "fixed";
    c.panel.theta2 = 12.5;
    c.radar.f0 = 9.4e9;
    c.detection.model = "sw1";
    c.simulation.seed = 0xfedcba9876543210ull;
    c.simulation.carrier_phase = false;
    c.losses.ris = 1.25;
    const std::string text = emit_config(c);
    const ScenarioConfig back = parse_config(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(emit_config(back), text);
    EXPECT_EQ(config_hash(back), config_hash(c));
    c.scene.r2 += 1.0;
    EXPECT_NE(config_hash(back), config_hash(c));
}

TEST(Config, UnitsAreConverted) {
    const auto c = parse_config("[radar]\nf0 = 10 GHz\ntau = 1500 ns\n[scene]\nr2 = 1.5 km  # comment\n");
    EXPECT_NEAR(c.wavelength(), 0.029979, 1e-6);
    EXPECT_NEAR(c.radar.tau, 1.5e-6, 1e-18);
    EXPECT_EQ(c.scene.r2, 1500.0);
    const auto s = parse_config("[panel]\ndx = 0.015 m\n");
    EXPECT_FALSE(s.panel.dx.wavelengths);
    EXPECT_NEAR(make_panel(s).dx(), 0.015, 1e-15);
}

TEST(Config, ErrorsNameTheOffendingKey) {
    const auto path_of = [](const std::string& text) {
        try {
            validate_config(parse_config(text));
        } catch (const ConfigError& e) {
            return e.path();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(path_of("[panel]\nn = 102\n"), "panel.n");
    EXPECT_EQ(path_of("[scene]\nr2 = 10 GHz\n"), "scene.r2");
    EXPECT_EQ(path_of("[scene]\nwibble = 3\n"), "scene.wibble");
    EXPECT_EQ(path_of("[detection]\npfa = 2\n"), "detection.pfa");
    EXPECT_EQ(path_of("[detection]\nmodel = sw3\n"), "detection.model");
    EXPECT_THROW(parse_config("[nosuch]\n"), ConfigError);
    EXPECT_THROW(parse_config("[scene]\nr2\n"), ConfigError);
}

TEST(Config, OverridesUseDottedPaths) {
    ScenarioConfig c;
    set_config_value(c, "timeline.pulses", "128");
    set_config_value(c, "scene.r1", "2 km");
    EXPECT_EQ(c.timeline.pulses, 128);
    EXPECT_EQ(c.scene.r1, 2000.0);
    EXPECT_THROW(set_config_value(c, "pulses", "3"), ConfigError);
}

TEST(Config, BuildersConvertDecibels) {
    const ScenarioConfig c;
    const auto r = make_radar(c);
    EXPECT_NEAR(r.peak_power, std::pow(10.0, 2.6), 1e-9);
    EXPECT_NEAR(make_ledger(c).total(), std::pow(10.0, 0.6), 1e-12);
    EXPECT_NEAR(make_dwell_plan(c).pri * 1e6, 66.71, 0.005);
}
