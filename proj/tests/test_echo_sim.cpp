#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "risradar/echo_sim.hpp"

using namespace risradar;

namespace {
constexpr double kB = 10e6, kTau = 1.5e-6;

double phase_diff(std::complex<double> a, std::complex<double> b) { return std::arg(a * std::conj(b)); }
}  // namespace

TEST(EchoSim, WaveformsHaveUnitEnergy) {
    for (auto kind : {PulseKind::lfm, PulseKind::unmodulated}) {
        for (double fs : {20e6, 33e6, 100e6}) {
            const PulseWaveform w(kind, kTau, kB, fs);
            EXPECT_NEAR(w.numeric_energy(), 1.0, 1e-6);
        }
    }
    EXPECT_THROW(PulseWaveform(PulseKind::lfm, kTau, kB, 15e6), std::invalid_argument);
    EXPECT_NO_THROW(PulseWaveform(PulseKind::lfm, kTau, kB, 15e6, 1.5));
}

TEST(EchoSim, LfmSpectrumOccupiesBandwidth) {
    const double fs = 160e6;
    const PulseWaveform w(PulseKind::lfm, kTau, kB, fs);
    const int nfft = 8192;
    std::vector<double> psd(nfft);
    double total = 0.0;
    for (int k = 0; k < nfft; ++k) {
        std::complex<double> acc{};
        for (std::size_t n = 0; n < w.length(); ++n)
            acc += w.samples()[n] * std::polar(1.0, -2.0 * kPi * k * static_cast<double>(n) / nfft);
        psd[k] = std::norm(acc);
        total += psd[k];
    }
    double inband = 0.0;
    for (int k = 0; k < nfft; ++k) {
        const double f = (k < nfft / 2 ? k : k - nfft) * fs / nfft;
        if (std::abs(f) <= kB / 2.0) inband += psd[k];
    }
    EXPECT_GT(inband / total, 0.9);
    double outside = 0.0;
    for (int k = 0; k < nfft; ++k) {
        const double f = (k < nfft / 2 ? k : k - nfft) * fs / nfft;
        if (std::abs(f) > 0.75 * kB) outside += psd[k];
    }
    EXPECT_LT(outside / total, 0.05);
}

TEST(EchoSim, BurstEnergyAndReplicas) {
    const PulseWaveform w(PulseKind::lfm, kTau, kB, 20e6);
    const double pt = 398.1;
    const auto one = generate_burst(w, 1, 10e-6, pt);
    EXPECT_NEAR(one.energy() / (pt * kTau), 1.0, 1e-6);
    const auto eight = generate_burst(w, 8, 10e-6, pt);
    EXPECT_NEAR(eight.energy() / (8 * pt * kTau), 1.0, 1e-6);
    for (int i = 1; i < 8; ++i) {
        for (std::size_t n = 0; n < w.length(); ++n)
            EXPECT_EQ(eight.data[static_cast<std::size_t>(i) * 200 + n], eight.data[n]);
    }
    EXPECT_THROW(generate_burst(w, 4, 1e-6, pt), std::invalid_argument);
}

TEST(EchoSim, AutocorrelationPeakIsOne) {
    for (auto kind : {PulseKind::lfm, PulseKind::unmodulated}) {
        const PulseWaveform w(kind, kTau, kB, 20e6);
        SampleStream s{20e6, w.samples()};
        s.data.resize(200);
        EXPECT_NEAR(std::abs(pulse_compress(s, w).data[0]), 1.0, 1e-12);
    }
}

TEST(EchoSim, CompressedMainlobeWidthNearInverseBandwidth) {
    const double fs = 400e6;
    const PulseWaveform w(PulseKind::lfm, kTau, kB, fs);
    SampleStream s{fs, std::vector<std::complex<double>>(2000)};
    for (std::size_t n = 0; n < w.length(); ++n) s.data[700 + n] = w.samples()[n];
    const auto z = pulse_compress(s, w);
    int above = 0;
    for (const auto& x : z.data) above += std::norm(x) >= 0.5 ? 1 : 0;
    const double width = above / fs;
    EXPECT_NEAR(width * kB, 0.886, 0.1);
}

TEST(EchoSim, AmbiguityFunctionProperties) {
    const PulseWaveform w(PulseKind::lfm, kTau, kB, 20e6);
    EXPECT_NEAR(std::abs(ambiguity_function(w, 0.0, 0.0)), 1.0, 1e-9);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> t(-kTau, kTau), f(-2e6, 2e6);
    for (int i = 0; i < 200; ++i) EXPECT_LE(std::abs(ambiguity_function(w, t(rng), f(rng), 512)), 1.0 + 1e-9);
}

// Doppler tolerance: 100 m/s closing speed at 10 GHz (6.7 kHz) barely moves
// the peak of the LFM ambiguity surface.
TEST(EchoSim, LfmIsDopplerTolerant) {
    const PulseWaveform w(PulseKind::lfm, kTau, kB, 20e6);
    const double fd = 2.0 * 100.0 / fixtures::radar().wavelength();
    const auto peak = [&](double f) {
        double best = 0.0;
        for (int i = -200; i <= 200; ++i) best = std::max(best, std::abs(ambiguity_function(w, i * 1e-10, f, 1024)));
        return best;
    };
    EXPECT_GE(peak(fd), 0.95 * peak(0.0));
}

TEST(EchoSim, TruthAmplitudeMatchesLinkBudget) {
    const auto p = fixtures::panel(101);
    const auto s = fixtures::scene(1000.0);
    const auto sig = fixtures::matched_sigma(p, s);
    const auto led = fixtures::ledger();
    const auto t = make_target_truth(fixtures::radar(), p, s, sig, 0.02, Vec3(0, 0, -30.0), led, 66.71e-6);
    EXPECT_NEAR(std::norm(t.amplitude) * led.propagation() / received_power(fixtures::radar(), p, s, sig, 0.02), 1.0,
                1e-9);
    // Target on the RIS boresight moving toward it at 30 m/s.
    EXPECT_NEAR(t.radial_velocity, 30.0, 1e-12);
    EXPECT_NEAR(t.doppler, 60.0 / fixtures::radar().wavelength(), 1e-9);
    EXPECT_NEAR(t.delay, 4000.0 / kSpeedOfLight, 1e-18);
    EXPECT_NEAR(t.one_hop_delay, 3000.0 / kSpeedOfLight, 1e-18);
    EXPECT_FALSE(t.doppler_ambiguous());
}

TEST(EchoSim, StaticTargetPulsesIdentical) {
    auto s = fixtures::setup(8, 3000.0);
    const auto t = fixtures::point(600.0, 0.0, s, std::polar(1.0, 0.4));
    const auto res = simulate(s, std::vector{t});
    const Eigen::Index h = std::lround(600.0 / res.data.range_bin());
    // Pulses sit at different sub-sample offsets; only kernel ripple separates them.
    for (Eigen::Index l = 1; l < 8; ++l)
        EXPECT_LT(std::abs(res.data.d(h, l) - res.data.d(h, 0)), 5e-3 * std::abs(res.data.d(h, 0)));
}

TEST(EchoSim, StopAndHopPhaseLaw) {
    auto s = fixtures::setup(4, 3000.0);
    const double pri = s.plan.pri;
    for (double nu : {0.25, -0.13, 0.4}) {
        const auto t = fixtures::point(600.0, nu / pri, s);
        const auto res = simulate(s, std::vector{t});
        const Eigen::Index h = std::lround(600.0 / res.data.range_bin());
        for (Eigen::Index l = 1; l < 4; ++l) {
            EXPECT_NEAR(phase_diff(res.data.d(h, l), res.data.d(h, l - 1)), std::remainder(2 * kPi * nu, 2 * kPi), 1e-3)
                << nu;
        }
    }
    // nu = 0.25: phases step through 1, j, -1, -j.
    const auto t = fixtures::point(600.0, 0.25 / pri, s);
    const auto res = simulate(s, std::vector{t});
    const Eigen::Index h = std::lround(600.0 / res.data.range_bin());
    const std::complex<double> ref = res.data.d(h, 0) / std::abs(res.data.d(h, 0));
    const std::complex<double> expect[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int l = 0; l < 4; ++l) EXPECT_NEAR(std::abs(res.data.d(h, l) / std::abs(res.data.d(h, l)) / ref - expect[l]), 0.0, 2e-3);
}

TEST(EchoSim, CompressedPeakAtTrueDelay) {
    const PulseWaveform w(PulseKind::lfm, kTau, kB, 20e6);
    BurstTiming bt{1, 100e-6, 20e6, 2000};
    SampleStream rx{20e6, std::vector<std::complex<double>>(2000)};
    const auto t = make_point_truth(1000.0, 2234.5, 0.0, {1.0, 0.0}, 100e-6, 0.03);
    synthesize_target_echo(rx, bt, w, std::vector{t});
    const auto z = pulse_compress(rx, w);
    std::size_t best = 0;
    for (std::size_t k = 0; k < z.size(); ++k)
        if (std::abs(z.data[k]) > std::abs(z.data[best])) best = k;
    EXPECT_LE(std::abs(static_cast<double>(best) - t.delay * 20e6), 1.0);
}

TEST(EchoSim, NoiseVarianceAndDeterminism) {
    const double n0 = 1e-20, fs = 20e6;
    BurstTiming bt{10, 5e-3, fs, 1'000'000};
    SampleStream a{fs, std::vector<std::complex<double>>(bt.length)};
    add_noise(a, bt, n0, 42, 1);
    double p = 0.0;
    for (const auto& x : a.data) p += std::norm(x);
    p /= static_cast<double>(a.size());
    EXPECT_NEAR(p / (n0 * fs), 1.0, 0.01);

    SampleStream b{fs, std::vector<std::complex<double>>(bt.length)};
    add_noise(b, bt, n0, 42, 4);
    EXPECT_TRUE(a.data == b.data);
    SampleStream c{fs, std::vector<std::complex<double>>(bt.length)};
    add_noise(c, bt, n0, 43, 1);
    EXPECT_FALSE(a.data == c.data);

    SampleStream z{fs, std::vector<std::complex<double>>(1000)};
    add_noise(z, BurstTiming{1, 1e-3, fs, 1000}, 0.0, 1);
    for (const auto& x : z.data) EXPECT_EQ(x, std::complex<double>{});
}

TEST(EchoSim, SegmentsPartitionStream) {
    BurstTiming bt{7, 13.3e-6, 20e6, 2200};
    std::size_t covered = 0;
    for (std::size_t l = 0; l < 7; ++l) {
        EXPECT_EQ(bt.segment_begin(l), covered);
        for (std::size_t k = bt.segment_begin(l); k < bt.segment_end(l); ++k) EXPECT_EQ(bt.segment_of(k), l);
        covered = bt.segment_end(l);
    }
    EXPECT_EQ(covered, bt.length);
}

TEST(EchoSim, DataMatrixShapeAndTargetRow) {
    EXPECT_EQ(data_matrix_hmax(1000.0, 0.0, 10e3, 10e6), 600);
    EXPECT_THROW(data_matrix_hmax(1000.0, 9000.0, 10e3, 10e6), std::domain_error);
    auto s = fixtures::setup(4);
    const double dr = kSpeedOfLight / (2 * kB);
    const double r2 = 123 * dr;
    const auto res = simulate(s, std::vector{fixtures::point(r2, 0.0, s)});
    EXPECT_EQ(res.data.rows(), 601);
    EXPECT_EQ(res.data.cols(), 4);
    Eigen::Index row = 0;
    res.data.d.col(0).cwiseAbs().maxCoeff(&row);
    EXPECT_EQ(row, 123);
    EXPECT_TRUE(res.data.d.allFinite());
    // r1 + r2_b + h_max * dR = R_ua within one bin.
    EXPECT_NEAR(1000.0 + res.data.h_max * dr, 10e3, dr);
}

TEST(EchoSim, EmptySceneNoiseIsFlatAcrossRows) {
    auto s = fixtures::setup(32, 3000.0, 20e6, 1e-20);
    s.seed = 5;
    const auto res = simulate(s, std::vector<TargetTruth>{});
    const Eigen::Index rows = res.data.rows();
    // Each row: mean of 32 unit-mean exponentials; 5-sigma band is +/- 5 / sqrt(32).
    for (Eigen::Index h = 0; h < rows; ++h) {
        const double p = res.data.d.row(h).cwiseAbs2().mean() / 1e-20;
        EXPECT_NEAR(p, 1.0, 5.0 / std::sqrt(32.0)) << h;
    }
}

TEST(EchoSim, RangeDopplerBinsAndEnergyAudit) {
    auto s = fixtures::setup(16, 3000.0);
    const double dr = kSpeedOfLight / (2 * kB);
    const auto stat = fixtures::point(40 * dr, 0.0, s, std::polar(2e-7, 1.0));
    const auto map0 = range_doppler_map(simulate(s, std::vector{stat}).data);
    const auto [h0, k0] = fixtures::argmax(map0);
    EXPECT_EQ(h0, 40);
    EXPECT_EQ(k0, 0);
    // Noiseless peak: Np^2 |alpha|^2 tau, up to the interpolation kernel's
    // passband ripple for a delay between samples.
    EXPECT_NEAR(map0(h0, k0) / (256.0 * 4e-14 * kTau), 1.0, 5e-3);

    for (int k : {1, 5, 11}) {
        const auto t = fixtures::point(40 * dr, k / (16.0 * s.plan.pri), s);
        const auto m = range_doppler_map(simulate(s, std::vector{t}).data);
        const auto [h, kk] = fixtures::argmax(m);
        EXPECT_EQ(kk, k);
        // No straddle: the other bins of the row are empty up to intra-pulse Doppler residue.
        for (Eigen::Index j = 0; j < 16; ++j)
            if (j != k) {
                EXPECT_LT(m(h, j), 1e-6 * m(h, kk));
            }
    }
    EXPECT_THROW(range_doppler_map(simulate(fixtures::setup(1, 3000.0), std::vector{stat}).data),
                 std::invalid_argument);
}

TEST(EchoSim, EnergyAuditExactOnSampleGrid) {
    // T = 400 samples and 2 (r1 + r2_min) / c = 300 samples, so every D
    // instant and every echo delay fall on samples.
    auto s = fixtures::setup(16, 400.0 * kSpeedOfLight / (2.0 * 20e6));
    s.r2_min = 300.0 * kSpeedOfLight / (2.0 * 20e6) - 1000.0;
    const double dr = kSpeedOfLight / (2 * kB);
    const auto t = fixtures::point(s.r2_min + 10 * dr, 0.0, s, std::polar(2e-7, -0.3));
    const auto map = range_doppler_map(simulate(s, std::vector{t}).data);
    const auto [h, k] = fixtures::argmax(map);
    EXPECT_EQ(h, 10);
    EXPECT_EQ(k, 0);
    EXPECT_NEAR(map(h, k) / (256.0 * 4e-14 * kTau), 1.0, 1e-9);
}

TEST(EchoSim, CoherentGainEqualsPulseCount) {
    const double n0 = 1e-20;
    auto s = fixtures::setup(16, 3000.0, 20e6, n0);
    const double dr = kSpeedOfLight / (2 * kB);
    const auto t = fixtures::point(40 * dr, 0.0, s, {3e-7, 0.0});
    double sig_pulse = 0.0, noise_pulse = 0.0, sig_map = 0.0, noise_map = 0.0;
    auto clean = s;
    clean.noise_density = 0.0;
    const auto r0 = simulate(clean, std::vector{t});
    sig_pulse = std::norm(r0.data.d(40, 0));
    sig_map = range_doppler_map(r0.data)(40, 0);
    const int trials = 200;
    for (int i = 0; i < trials; ++i) {
        s.seed = 1000 + i;
        const auto r = simulate(s, std::vector<TargetTruth>{});
        const auto m = range_doppler_map(r.data);
        noise_pulse += r.data.d.row(40).cwiseAbs2().mean();
        noise_map += m.row(40).mean();
    }
    const double gain = (sig_map / noise_map) / (sig_pulse / noise_pulse);
    EXPECT_NEAR(linear_to_db(gain), linear_to_db(16.0), 0.3);
}

TEST(EchoSim, ResolutionReport) {
    const auto plan = build_dwell_plan(kTau, 1000.0, 10e3, 128);
    const auto r = resolution_report(fixtures::radar(), plan);
    EXPECT_NEAR(r.range, 15.0, 0.02);
    EXPECT_NEAR(r.doppler, 117.1, 0.05);
}

TEST(EchoSim, SerialAndParallelBitIdentical) {
    auto s = fixtures::setup(8, 4000.0, 20e6, 1e-20);
    s.seed = 77;
    const auto t = fixtures::point(1000.0, 1234.0, s, {1e-9, 2e-9});
    s.threads = 1;
    const auto a = simulate(s, std::vector{t});
    s.threads = 4;
    const auto b = simulate(s, std::vector{t});
    EXPECT_TRUE(a.data.d == b.data.d);
}

TEST(EchoSim, ClutterRingAddsZeroDopplerPower) {
    auto s = fixtures::setup(16, 3000.0);
    s.clutter = ClutterInjection{1e-12, 600.0, 64};
    const auto m = range_doppler_map(simulate(s, std::vector<TargetTruth>{}).data);
    const auto [h, k] = fixtures::argmax(m);
    EXPECT_EQ(k, 0);
    EXPECT_EQ(h, std::lround(600.0 / (kSpeedOfLight / (2 * kB))));
}
