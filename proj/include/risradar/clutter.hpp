#pragma once

// Clutter cell geometry and signal-to-clutter ratios for targets served
// through the RIS. SCR formulas use the small-angle forms.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "risradar/constants.hpp"
#include "risradar/link_budget.hpp"

namespace risradar {

struct ClutterEnvironment {
    double sigma0 = 0.0;  // surface reflectivity, m^2/m^2
    double gamma0 = 0.0;  // volume reflectivity, m^2/m^3
    double grazing = 0.0; // rad

    void validate() const {
        if (!(sigma0 >= 0.0) || !(gamma0 >= 0.0)) throw std::invalid_argument("reflectivities must be >= 0");
        if (!(grazing >= 0.0 && grazing < kPi / 2.0)) throw std::domain_error("grazing angle must lie in [0, pi/2)");
    }
};

enum class ClutterRegime { pulse_length_limited, beamwidth_limited };

namespace detail {
inline void check_grazing(double psi) {
    if (!(psi >= 0.0 && psi < kPi / 2.0)) throw std::domain_error("grazing angle must lie in [0, pi/2)");
}
}  // namespace detail

/// Ground patch of the range gate inside the RIS azimuth beam.
inline double illuminated_area_pulse_limited(double r2, double tau, double phi_bar, double psi, bool exact = false) {
    detail::check_grazing(psi);
    if (!(r2 > 0.0) || !(tau > 0.0) || !(phi_bar > 0.0)) throw std::invalid_argument("positive inputs required");
    const double half_pulse = kSpeedOfLight * tau / 2.0;
    const double sec = 1.0 / std::cos(psi);
    return exact ? 2.0 * r2 * half_pulse * std::tan(phi_bar / 2.0) * sec : r2 * half_pulse * phi_bar * sec;
}

/// Circular beam footprint.
inline double illuminated_area_beam_limited(double r2, double phi_bar, bool exact = false) {
    if (!(r2 > 0.0) || !(phi_bar > 0.0)) throw std::invalid_argument("positive inputs required");
    const double t = std::tan(phi_bar / 2.0);
    return exact ? kPi * r2 * r2 * t * t : kPi * r2 * r2 * phi_bar * phi_bar / 4.0;
}

inline double illuminated_volume(double r2, double tau, double phi_bar, double theta_bar, bool exact = false) {
    if (!(r2 > 0.0) || !(tau > 0.0) || !(phi_bar > 0.0) || !(theta_bar > 0.0)) {
        throw std::invalid_argument("positive inputs required");
    }
    const double half_pulse = kSpeedOfLight * tau / 2.0;
    return exact ? kPi * r2 * r2 * half_pulse * std::tan(phi_bar / 2.0) * std::tan(theta_bar / 2.0)
                 : kPi / 4.0 * half_pulse * r2 * r2 * phi_bar * theta_bar;
}

/// Returns +inf for a clutter-free environment.
inline double scr_pulse_length_limited(double rcs, const ClutterEnvironment& env, double r2, double tau,
                                       double phi_bar) {
    detail::check_grazing(env.grazing);
    if (env.sigma0 == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::cos(env.grazing) * rcs / (r2 * kSpeedOfLight * tau * phi_bar * env.sigma0);
}

inline double scr_beamwidth_limited(double rcs, const ClutterEnvironment& env, double r2, double phi_bar) {
    if (env.sigma0 == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * rcs / (kPi * r2 * r2 * phi_bar * phi_bar * env.sigma0);
}

inline double scr_volume(double rcs, const ClutterEnvironment& env, double r2, double tau, double phi_bar,
                         double theta_bar) {
    if (env.gamma0 == 0.0) return std::numeric_limits<double>::infinity();
    return 8.0 * rcs / (kPi * kSpeedOfLight * tau * r2 * r2 * phi_bar * theta_bar * env.gamma0);
}

/// The clutter cell is the smaller of the range-gate strip and the beam
/// footprint; ties go to pulse-length-limited. At the boundary the two
/// small-angle areas (and so the two SCRs) coincide.
inline ClutterRegime clutter_regime(double r2, double tau, double phi_bar, double psi) {
    detail::check_grazing(psi);
    const double strip = kSpeedOfLight * tau / 2.0 / std::cos(psi);
    const double footprint = kPi / 4.0 * r2 * phi_bar;
    return strip <= footprint ? ClutterRegime::pulse_length_limited : ClutterRegime::beamwidth_limited;
}

/// Surface clutter power (W) at the radar for the given regime.
inline double surface_clutter_power(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                    const ComplexMatrix& sigma, const ClutterEnvironment& env, double phi_bar,
                                    ClutterRegime regime) {
    const double area = regime == ClutterRegime::pulse_length_limited
                            ? illuminated_area_pulse_limited(scene.r2(), radar.pulse_length, phi_bar, env.grazing)
                            : illuminated_area_beam_limited(scene.r2(), phi_bar);
    return received_power(radar, panel, scene, sigma, area * env.sigma0);
}

inline double volume_clutter_power(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                   const ComplexMatrix& sigma, const ClutterEnvironment& env, double phi_bar,
                                   double theta_bar) {
    const double vol = illuminated_volume(scene.r2(), radar.pulse_length, phi_bar, theta_bar);
    return received_power(radar, panel, scene, sigma, vol * env.gamma0);
}

}  // namespace risradar
