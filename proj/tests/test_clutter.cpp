#include <gtest/gtest.h>

#include <random>

#include "risradar/clutter.hpp"

using namespace risradar;

namespace {
const ClutterEnvironment kEnv{db_to_linear(-20.0), db_to_linear(-60.0), deg_to_rad(5.0)};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
    mx /= x.size(), my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}
}  // namespace

TEST(Clutter, ScrEqualsSignalOverClutterPowerForAnyRadar) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pt(1.0, 1e4), gt(10.0, 1e5), r1(300.0, 5000.0);
    const double l = RadarSystem{}.wavelength();
    const RisPanel p(41, 41, l / 2, l / 2);
    const double rcs = 0.02, r2 = 1500.0, phi_bar = 0.02, theta_bar = 0.03;
    const double ref_pll = scr_pulse_length_limited(rcs, kEnv, r2, 1.5e-6, phi_bar);
    const double ref_bwl = scr_beamwidth_limited(rcs, kEnv, r2, phi_bar);
    const double ref_v = scr_volume(rcs, kEnv, r2, 1.5e-6, phi_bar, theta_bar);
    for (int i = 0; i < 200; ++i) {
        RadarSystem radar;
        radar.peak_power = pt(rng);
        radar.tx_gain = gt(rng);
        const auto s = SceneGeometry::from_polar(r1(rng), {0.5, 0.3}, r2, {0.2, -0.4});
        const auto g = phase_matched_program(s.radar_from_ris(), s.target_from_ris(), p, l);
        const ComplexMatrix sig = scene_sigma(s, p, g, l);
        const double sp = received_power(radar, p, s, sig, rcs);
        const double pll = sp / surface_clutter_power(radar, p, s, sig, kEnv, phi_bar, ClutterRegime::pulse_length_limited);
        const double bwl = sp / surface_clutter_power(radar, p, s, sig, kEnv, phi_bar, ClutterRegime::beamwidth_limited);
        const double v = sp / volume_clutter_power(radar, p, s, sig, kEnv, phi_bar, theta_bar);
        EXPECT_NEAR(pll / ref_pll, 1.0, 1e-12);
        EXPECT_NEAR(bwl / ref_bwl, 1.0, 1e-12);
        EXPECT_NEAR(v / ref_v, 1.0, 1e-12);
    }
}

TEST(Clutter, RangeScalingLaws) {
    std::vector<double> r, pll, bwl, vol;
    for (double r2 = 200.0; r2 <= 5000.0; r2 *= 1.17) {
        r.push_back(r2);
        pll.push_back(scr_pulse_length_limited(0.02, kEnv, r2, 1.5e-6, 0.01));
        bwl.push_back(scr_beamwidth_limited(0.02, kEnv, r2, 0.01));
        vol.push_back(scr_volume(0.02, kEnv, r2, 1.5e-6, 0.01, 0.012));
    }
    EXPECT_NEAR(slope(r, pll), -1.0, 1e-6);
    EXPECT_NEAR(slope(r, bwl), -2.0, 1e-6);
    EXPECT_NEAR(slope(r, vol), -2.0, 1e-6);
}

TEST(Clutter, ZeroReflectivityMeansInfiniteScr) {
    const ClutterEnvironment clean{0.0, 0.0, 0.1};
    EXPECT_TRUE(std::isinf(scr_pulse_length_limited(0.02, clean, 1000.0, 1.5e-6, 0.01)));
    EXPECT_TRUE(std::isinf(scr_beamwidth_limited(0.02, clean, 1000.0, 0.01)));
    EXPECT_TRUE(std::isinf(scr_volume(0.02, clean, 1000.0, 1.5e-6, 0.01, 0.01)));
}

TEST(Clutter, SmallAngleAreasApproachExact) {
    const double a = illuminated_area_pulse_limited(1000.0, 1.5e-6, 1e-3, 0.1);
    const double b = illuminated_area_pulse_limited(1000.0, 1.5e-6, 1e-3, 0.1, true);
    EXPECT_NEAR(a / b, 1.0, 1e-6);
    EXPECT_NEAR(illuminated_area_beam_limited(1000.0, 1e-3) / illuminated_area_beam_limited(1000.0, 1e-3, true), 1.0,
                1e-6);
    EXPECT_NEAR(illuminated_volume(1000.0, 1.5e-6, 1e-3, 2e-3) / illuminated_volume(1000.0, 1.5e-6, 1e-3, 2e-3, true),
                1.0, 1e-6);
}

TEST(Clutter, RegimeSwitchesWhereScrsCoincide) {
    const double tau = 1.5e-6, phi_bar = 0.01, psi = 0.05;
    // Boundary: (c tau / 2) sec psi = (pi / 4) r2 phi_bar.
    const double rb = kSpeedOfLight * tau / 2.0 / std::cos(psi) / (kPi / 4.0 * phi_bar);
    const ClutterEnvironment env{0.01, 0.0, psi};
    EXPECT_NEAR(scr_pulse_length_limited(0.02, env, rb, tau, phi_bar) / scr_beamwidth_limited(0.02, env, rb, phi_bar),
                1.0, 1e-12);
    EXPECT_EQ(clutter_regime(rb * 1.01, tau, phi_bar, psi), ClutterRegime::pulse_length_limited);
    EXPECT_EQ(clutter_regime(rb * 0.99, tau, phi_bar, psi), ClutterRegime::beamwidth_limited);
}

TEST(Clutter, GrazingDomainChecked) {
    EXPECT_THROW(illuminated_area_pulse_limited(1000.0, 1e-6, 0.01, kPi / 2.0), std::domain_error);
    EXPECT_THROW(clutter_regime(1000.0, 1e-6, 0.01, -0.1), std::domain_error);
    EXPECT_THROW((ClutterEnvironment{-1.0, 0.0, 0.0}.validate()), std::invalid_argument);
}
