#pragma once

// Reference-scenario pieces shared by the unit tests and the acceptance runner.

#include <vector>

#include "risradar/echo_sim.hpp"
#include "risradar/link_budget.hpp"

namespace fixtures {

using namespace risradar;

inline RadarSystem radar() { return RadarSystem{}; }

inline RisPanel panel(int n) {
    const double l = radar().wavelength();
    return RisPanel(n, n, l / 2.0, l / 2.0, 0.8, db_to_linear(4.0));
}

inline SceneGeometry scene(double r2, double r1 = 1000.0) {
    return SceneGeometry::from_polar(r1, {deg_to_rad(30.0), deg_to_rad(20.0)}, r2, {0.0, 0.0});
}

inline LossLedger ledger() {
    LossLedger l;
    l.transmit = db_to_linear(6.0);
    return l;
}

inline ComplexMatrix matched_sigma(const RisPanel& p, const SceneGeometry& s) {
    const double l = radar().wavelength();
    return scene_sigma(s, p, phase_matched_program(s.radar_from_ris(), s.target_from_ris(), p, l), l);
}

/// Noiseless-by-default simulation setup for the reference radar.
inline SimulationSetup setup(int pulses, double r_ua = 10e3, double fs = 20e6, double noise_density = 0.0,
                             PulseKind kind = PulseKind::lfm) {
    const RadarSystem r = radar();
    return SimulationSetup{PulseWaveform(kind, r.pulse_length, r.bandwidth, fs),
                           build_dwell_plan(r.pulse_length, 1000.0, r_ua, pulses),
                           0.0,
                           noise_density,
                           1.0,
                           std::nullopt,
                           1,
                           1,
                           0};
}

/// Unit-amplitude point target at RIS range r2.
inline TargetTruth point(double r2, double doppler, const SimulationSetup& s, std::complex<double> a = {1.0, 0.0}) {
    return make_point_truth(s.plan.r1, r2, doppler, a, s.plan.pri, radar().wavelength());
}

/// Row/column of the map maximum.
inline std::pair<Eigen::Index, Eigen::Index> argmax(const Eigen::MatrixXd& m) {
    Eigen::Index r = 0, c = 0;
    m.maxCoeff(&r, &c);
    return {r, c};
}

/// Number of strict local maxima above `floor_fraction` of the maximum in a 1-D cut.
inline int local_maxima(const std::vector<double>& v, double floor_fraction = 0.1) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, x);
    int count = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] >= floor_fraction * mx) ++count;
    }
    return count;
}

}  // namespace fixtures
