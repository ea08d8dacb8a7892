#include <gtest/gtest.h>

#include <random>

#include "risradar/pattern.hpp"

using namespace risradar;

namespace {
constexpr double kLambda = kSpeedOfLight / 10e9;

RisPanel half_wave(int n, int m) { return RisPanel(n, m, kLambda / 2.0, kLambda / 2.0); }

double direct_pattern(const RisPanel& p, const Direction& radar, const Direction& target, const Direction& p1,
                      const Direction& p2) {
    const auto g = phase_matched_program(p1, p2, p, kLambda);
    return induced_pattern_direct(steering_matrix(p, radar, kLambda), g, steering_matrix(p, target, kLambda));
}
}  // namespace

TEST(Pattern, MatchedDirectionGivesNm4) {
    const auto p = half_wave(7, 9);
    const Direction a{0.5, 0.3}, b{0.2, -1.0};
    EXPECT_NEAR(direct_pattern(p, a, b, a, b) / std::pow(63.0, 4), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(induced_pattern_closed_form({0.0, 0.0}, 7, 9), std::pow(63.0, 4));
}

TEST(Pattern, DirichletNullsAtMultiplesOfOneOverN) {
    for (int n : {5, 101}) {
        for (int k = 1; k < n; ++k) {
            const double v = induced_pattern_closed_form({static_cast<double>(k) / n, 0.0}, n, n);
            EXPECT_LT(v / std::pow(double(n) * n, 4), 1e-20) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Pattern, PeriodicInOffsetWithPeriodOne) {
    // n odd: sin(pi n (dk+1)) / sin(pi (dk+1)) = sin(pi n dk) / sin(pi dk).
    for (double dk : {0.013, 0.2, 0.37}) {
        EXPECT_NEAR(dirichlet_ratio(dk + 1.0, 11), dirichlet_ratio(dk, 11), 1e-9);
    }
    EXPECT_DOUBLE_EQ(dirichlet_ratio(1.0, 11), 11.0);
}

TEST(Pattern, ClosedFormMatchesDirectSummationRandomised) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> th(0.0, kPi / 2.0), ph(-kPi + 1e-9, kPi);
    for (int n : {5, 31}) {
        const auto p = half_wave(n, n);
        for (int i = 0; i < 200; ++i) {
            const Direction r{th(rng), ph(rng)}, t{th(rng), ph(rng)}, p1{th(rng), ph(rng)}, p2{th(rng), ph(rng)};
            const double direct = direct_pattern(p, r, t, p1, p2);
            const double closed = induced_pattern_closed_form(offsets_from_angles(r, t, p1, p2, p, kLambda), n, n);
            EXPECT_NEAR(direct, closed, 1e-9 * closed) << "trial " << i;
        }
    }
}

TEST(Pattern, NormalisedPatternBoundedByZeroDb) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dk(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = induced_pattern_closed_form({dk(rng), dk(rng)}, 15, 21);
        EXPECT_LE(normalized_pattern_db(v, 15, 21), 1e-12);
    }
}

TEST(Pattern, BroadsideBeamwidthNearAnalytic) {
    for (int n : {101, 133, 201}) {
        const auto p = half_wave(n, n);
        const auto bw = beamwidths(p, kLambda);
        EXPECT_NEAR(bw.phi_bar / (0.891 / n), 1.0, 0.02) << n;
        EXPECT_NEAR(bw.theta_bar, bw.phi_bar, 1e-15);
    }
}

TEST(Pattern, BeamwidthIsWhereFactorDropsByDefinedLoss) {
    const auto p = half_wave(101, 101);
    const auto bw = beamwidths(p, kLambda);
    const double du = std::sin(bw.phi_bar);
    EXPECT_NEAR(factor_loss_db(p.dx() / kLambda * du, 101), kBeamwidthDropDb, 1e-6);
}

TEST(Pattern, SteeredBeamIsWiderThanBroadside) {
    const auto p = half_wave(101, 101);
    const auto b0 = beamwidths(p, kLambda);
    const auto b45 = beamwidths(p, kLambda, {deg_to_rad(45.0), 0.0});
    EXPECT_GT(b45.phi_bar, b0.phi_bar * 1.3);
    EXPECT_NEAR(b45.theta_bar, b0.theta_bar, 0.05 * b0.theta_bar);
}

TEST(Pattern, PatchPatternAndScanningLoss) {
    EXPECT_DOUBLE_EQ(patch_pattern(0.0), 1.0);
    EXPECT_DOUBLE_EQ(patch_pattern(-0.1), 0.0);
    EXPECT_DOUBLE_EQ(patch_pattern(kPi / 2.0 + 0.01), 0.0);
    EXPECT_NEAR(scanning_loss_db(deg_to_rad(45.0)), 30.0 * std::log10(std::sqrt(2.0)), 1e-12);
    EXPECT_EQ(scanning_loss_db(kPi / 2.0), std::numeric_limits<double>::infinity());
    EXPECT_THROW(scanning_loss_db(-0.1), std::domain_error);
    double prev = -1.0;
    for (int d = 0; d < 90; ++d) {
        const double v = scanning_loss_db(deg_to_rad(d));
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Pattern, TilingSingleBeamForTinySector) {
    const auto p = half_wave(101, 101);
    const AngularSector s{0.0, deg_to_rad(0.1), 0.0, deg_to_rad(1.0)};
    const auto g = tile_sector(s, p, kLambda, 3.0);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_LE(g.max_edge_loss_db, 3.0);
}

TEST(Pattern, TilingSectorTwiceFullWidthNeedsSeveralBeams) {
    const auto p = half_wave(101, 101);
    const double full = 2.0 * beamwidths(p, kLambda).phi_bar;
    const AngularSector s{0.0, 2.0 * full, 0.0, 0.0};
    EXPECT_GE(tile_sector(s, p, kLambda, 3.0).size(), 2u);
}

// Dense random audit: every sector direction must be within the loss budget
// of some beam of the grid.
TEST(Pattern, TilingCoversSectorWithinBudget) {
    const auto p = half_wave(31, 41);
    const AngularSector s{deg_to_rad(5.0), deg_to_rad(35.0), deg_to_rad(-40.0), deg_to_rad(25.0)};
    for (double budget : {1.0, 3.0}) {
        const auto g = tile_sector(s, p, kLambda, budget);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> th(s.theta_min, s.theta_max), ph(s.phi_min, s.phi_max);
        for (int i = 0; i < 3000; ++i) {
            const auto c = directional_cosines(th(rng), ph(rng));
            double best = std::numeric_limits<double>::infinity();
            for (const auto& b : g.beams) best = std::min(best, pointing_loss_db(c, directional_cosines(b.pointing), p, kLambda));
            EXPECT_LE(best, budget + 1e-9) << "budget " << budget << " sample " << i;
        }
        EXPECT_LE(g.max_edge_loss_db, budget + 1e-9);
    }
}

TEST(Pattern, TilingRejectsBadInput) {
    const auto p = half_wave(11, 11);
    EXPECT_THROW(tile_sector({0.0, 0.1, 0.0, 0.1}, p, kLambda, 0.0), std::invalid_argument);
    EXPECT_THROW(tile_sector({0.2, 0.1, 0.0, 0.1}, p, kLambda, 3.0), std::invalid_argument);
}
