#pragma once

// Reference frames, angles and RIS array manifolds.
//
// Angle convention (both frames): elevation theta is measured from the local
// z-axis (boresight), azimuth phi in the local x-y plane from the x-axis.
// All angles are radians.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "risradar/constants.hpp"

namespace risradar {

using Vec3 = Eigen::Vector3d;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Elevation/azimuth pair in a local frame.
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

struct DirectionalCosines {
    double u = 0.0;
    double v = 0.0;
};

inline void check_direction(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= kPi / 2.0)) {
        throw std::domain_error("elevation " + std::to_string(theta) + " rad outside [0, pi/2]");
    }
    if (!(phi > -kPi && phi <= kPi)) {
        throw std::domain_error("azimuth " + std::to_string(phi) + " rad outside (-pi, pi]");
    }
}

inline DirectionalCosines directional_cosines(double theta, double phi) {
    check_direction(theta, phi);
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)};
}

inline DirectionalCosines directional_cosines(const Direction& d) {
    return directional_cosines(d.theta, d.phi);
}

/// Wraps an azimuth into (-pi, pi].
inline double wrap_azimuth(double phi) {
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

/// Orthonormal right-handed frame attached to a point. z is boresight.
class LocalFrame {
public:
    LocalFrame() = default;

    LocalFrame(const Vec3& origin, const Vec3& x, const Vec3& y, const Vec3& z)
        : origin_(origin), x_(x), y_(y), z_(z) {}

    /// Builds the frame from a boresight and an up hint. The y-axis is the up
    /// hint projected onto the plane normal to the boresight; when the hint is
    /// (nearly) parallel to the boresight, world x is used instead.
    static LocalFrame from_boresight(const Vec3& origin, const Vec3& boresight,
                                     const Vec3& up = Vec3::UnitZ()) {
        const double bn = boresight.norm();
        if (!(bn > 0.0) || !std::isfinite(bn)) {
            throw std::invalid_argument("boresight must be a nonzero finite vector");
        }
        const Vec3 z = boresight / bn;
        Vec3 y = up - up.dot(z) * z;
        if (y.norm() < 1e-9 * up.norm() || !(up.norm() > 0.0)) {
            const Vec3 alt = Vec3::UnitX();
            y = alt - alt.dot(z) * z;
            if (y.norm() < 1e-9) {
                const Vec3 alt2 = Vec3::UnitY();
                y = alt2 - alt2.dot(z) * z;
            }
        }
        y.normalize();
        const Vec3 x = y.cross(z);
        return LocalFrame(origin, x, y, z);
    }

    const Vec3& origin() const { return origin_; }
    const Vec3& x_axis() const { return x_; }
    const Vec3& y_axis() const { return y_; }
    const Vec3& z_axis() const { return z_; }

    /// Direction of `point` seen from the origin. theta may exceed pi/2 for
    /// points behind the frame; callers validate.
    Direction direction_to(const Vec3& point) const {
        const Vec3 d = point - origin_;
        const double r = d.norm();
        if (!(r > 0.0)) throw std::domain_error("point coincides with frame origin");
        const double lx = d.dot(x_) / r, ly = d.dot(y_) / r, lz = d.dot(z_) / r;
        const double theta = std::atan2(std::hypot(lx, ly), lz);
        const double phi = (lx == 0.0 && ly == 0.0) ? 0.0 : wrap_azimuth(std::atan2(ly, lx));
        return {theta, phi};
    }

    /// World-frame unit vector for a local direction.
    Vec3 unit_vector(const Direction& d) const {
        const double st = std::sin(d.theta);
        return st * std::cos(d.phi) * x_ + st * std::sin(d.phi) * y_ + std::cos(d.theta) * z_;
    }

private:
    Vec3 origin_ = Vec3::Zero();
    Vec3 x_ = Vec3::UnitX();
    Vec3 y_ = Vec3::UnitY();
    Vec3 z_ = Vec3::UnitZ();
};

/// Planar RIS of N x M passive patches on a rectangular grid centred on the
/// origin of its frame.
class RisPanel {
public:
    RisPanel(int n, int m, double dx, double dy, double efficiency = 0.8, double patch_gain = 1.0,
             double pattern_exponent = 1.5)
        : n_(n), m_(m), dx_(dx), dy_(dy), eta_(efficiency), gain_(patch_gain),
          exponent_(pattern_exponent) {
        if (n < 1 || m < 1 || n % 2 == 0 || m % 2 == 0) {
            throw std::invalid_argument("RIS patch counts must be odd and >= 1 (got N=" +
                                        std::to_string(n) + ", M=" + std::to_string(m) + ")");
        }
        if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("RIS pitch must be positive");
        if (!(efficiency > 0.0 && efficiency <= 1.0)) {
            throw std::invalid_argument("RIS patch efficiency must lie in (0, 1]");
        }
        if (!(patch_gain > 0.0)) throw std::invalid_argument("RIS patch gain must be positive");
        if (!(pattern_exponent > 0.0)) throw std::invalid_argument("patch pattern exponent must be positive");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double efficiency() const { return eta_; }
    double patch_gain() const { return gain_; }
    double pattern_exponent() const { return exponent_; }

    /// Centre of patch (i, h), zero-based, in the panel frame.
    Vec3 patch_center(int i, int h) const {
        return {(-(n_ - 1) / 2.0 + i) * dx_, (-(m_ - 1) / 2.0 + h) * dy_, 0.0};
    }

    double aperture_x() const { return dx_ * n_; }
    double aperture_y() const { return dy_ * m_; }

private:
    int n_;
    int m_;
    double dx_;
    double dy_;
    double eta_;
    double gain_;
    double exponent_;
};

/// Positions of radar, RIS and target plus the two frame orientations. Ranges
/// and angles are derived from the positions on construction.
class SceneGeometry {
public:
    SceneGeometry(const LocalFrame& radar_frame, const LocalFrame& ris_frame, const Vec3& target)
        : radar_(radar_frame), ris_(ris_frame), target_(target) {
        r1_ = (radar_.origin() - ris_.origin()).norm();
        r2_ = (target_ - ris_.origin()).norm();
        if (!(r1_ > 0.0) || !(r2_ > 0.0)) throw std::domain_error("scene ranges must be positive");
        ris_from_radar_ = radar_.direction_to(ris_.origin());
        radar_from_ris_ = ris_.direction_to(radar_.origin());
        target_from_ris_ = ris_.direction_to(target_);
        const auto front = [](const Direction& d, const char* what) {
            if (d.theta > kPi / 2.0) {
                throw std::domain_error(std::string(what) + " lies behind the reference plane");
            }
        };
        front(ris_from_radar_, "RIS (seen from radar)");
        front(radar_from_ris_, "radar (seen from RIS)");
        front(target_from_ris_, "target (seen from RIS)");
    }

    /// Scene with the RIS at the world origin (CRS2 = world axes), the radar at
    /// range r1 along `radar_dir` and the target at range r2 along `target_dir`
    /// (both directions in the RIS frame). The radar boresight points at the RIS.
    static SceneGeometry from_polar(double r1, const Direction& radar_dir, double r2,
                                    const Direction& target_dir) {
        check_direction(radar_dir.theta, radar_dir.phi);
        check_direction(target_dir.theta, target_dir.phi);
        if (!(r1 > 0.0) || !(r2 > 0.0)) throw std::domain_error("scene ranges must be positive");
        const LocalFrame ris;
        const Vec3 radar_pos = r1 * ris.unit_vector(radar_dir);
        const LocalFrame radar = LocalFrame::from_boresight(radar_pos, -radar_pos);
        return SceneGeometry(radar, ris, r2 * ris.unit_vector(target_dir));
    }

    /// Same scene with the target moved along its RIS-relative direction.
    SceneGeometry with_target_range(double r2) const {
        const Vec3 dir = (target_ - ris_.origin()) / r2_;
        return SceneGeometry(radar_, ris_, ris_.origin() + r2 * dir);
    }

    SceneGeometry with_radar_range(double r1) const {
        const Vec3 dir = (radar_.origin() - ris_.origin()) / r1_;
        const Vec3 pos = ris_.origin() + r1 * dir;
        const LocalFrame radar(pos, radar_.x_axis(), radar_.y_axis(), radar_.z_axis());
        return SceneGeometry(radar, ris_, target_);
    }

    const LocalFrame& radar_frame() const { return radar_; }
    const LocalFrame& ris_frame() const { return ris_; }
    const Vec3& radar_position() const { return radar_.origin(); }
    const Vec3& ris_position() const { return ris_.origin(); }
    const Vec3& target_position() const { return target_; }

    double r1() const { return r1_; }
    double r2() const { return r2_; }
    /// (theta_R, phi_R): RIS direction in the radar frame.
    const Direction& ris_from_radar() const { return ris_from_radar_; }
    /// (theta_RIS^R, phi_RIS^R): radar direction in the RIS frame.
    const Direction& radar_from_ris() const { return radar_from_ris_; }
    /// (theta_RIS^Ta, phi_RIS^Ta): target direction in the RIS frame.
    const Direction& target_from_ris() const { return target_from_ris_; }

private:
    LocalFrame radar_;
    LocalFrame ris_;
    Vec3 target_;
    double r1_ = 0.0;
    double r2_ = 0.0;
    Direction ris_from_radar_;
    Direction radar_from_ris_;
    Direction target_from_ris_;
};

/// Horizontal (x, N entries) and vertical (y, M entries) manifold vectors.
inline std::pair<ComplexVector, ComplexVector> manifold_vectors(const RisPanel& panel, const Direction& dir,
                                                                double lambda0) {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("wavelength must be positive");
    const auto dc = directional_cosines(dir);
    const int n = panel.n(), m = panel.m();
    ComplexVector p1(n), p2(m);
    const double ku = kPi * panel.dx() / lambda0 * dc.u;
    const double kv = kPi * panel.dy() / lambda0 * dc.v;
    for (int k = 0; k < n; ++k) p1(k) = std::polar(1.0, ku * (2.0 * k + 1.0 - n));
    for (int k = 0; k < m; ++k) p2(k) = std::polar(1.0, kv * (2.0 * k + 1.0 - m));
    return {std::move(p1), std::move(p2)};
}

/// Rank-one steering matrix p1 * p2^T.
inline ComplexMatrix steering_matrix(const RisPanel& panel, const Direction& dir, double lambda0) {
    const auto [p1, p2] = manifold_vectors(panel, dir, lambda0);
    return p1 * p2.transpose();
}

/// Programmable reflection coefficients of a passive panel (|Gamma| <= 1).
class ReflectionProgram {
public:
    explicit ReflectionProgram(ComplexMatrix gamma) : gamma_(std::move(gamma)) {
        for (Eigen::Index i = 0; i < gamma_.size(); ++i) {
            const double mag = std::abs(gamma_.data()[i]);
            if (!(mag <= 1.0 + 1e-12)) {
                throw std::invalid_argument("reflection coefficient magnitude exceeds 1 (passive panel)");
            }
        }
    }

    const ComplexMatrix& matrix() const { return gamma_; }
    Eigen::Index rows() const { return gamma_.rows(); }
    Eigen::Index cols() const { return gamma_.cols(); }

private:
    ComplexMatrix gamma_;
};

/// Conjugate phase program that coherently aligns the contributions for the
/// radar-side pointing and the target-side pointing.
inline ReflectionProgram phase_matched_program(const Direction& pointing1, const Direction& pointing2,
                                               const RisPanel& panel, double lambda0) {
    const ComplexMatrix s1 = steering_matrix(panel, pointing1, lambda0);
    const ComplexMatrix s2 = steering_matrix(panel, pointing2, lambda0);
    return ReflectionProgram(s1.conjugate().cwiseProduct(s2.conjugate()));
}

/// Sigma = S1 (.) Gamma (.) S2.
inline ComplexMatrix sigma_matrix(const ComplexMatrix& s1, const ReflectionProgram& gamma,
                                  const ComplexMatrix& s2) {
    if (s1.rows() != gamma.rows() || s1.cols() != gamma.cols() || s2.rows() != gamma.rows() ||
        s2.cols() != gamma.cols()) {
        throw std::invalid_argument("sigma_matrix: dimension mismatch");
    }
    return s1.cwiseProduct(gamma.matrix()).cwiseProduct(s2);
}

/// Sigma for a scene: steering matrices at the actual radar and target
/// directions combined with `gamma`.
inline ComplexMatrix scene_sigma(const SceneGeometry& scene, const RisPanel& panel, const ReflectionProgram& gamma,
                                 double lambda0) {
    return sigma_matrix(steering_matrix(panel, scene.radar_from_ris(), lambda0), gamma,
                        steering_matrix(panel, scene.target_from_ris(), lambda0));
}

}  // namespace risradar
