#pragma once

// Burst timing for RIS-relayed operation and the sequential scan schedule.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "risradar/constants.hpp"
#include "risradar/pattern.hpp"

namespace risradar {

/// `from_ris`: next pulse after 2 R_ua / c + 2 r1 / c (R_ua counted from the RIS).
/// `from_radar`: PRI = 2 R_ua / c (R_ua counted from the radar).
enum class PriConvention { from_ris, from_radar };

inline double pri_from_unambiguous_range(double r_ua, double r1, PriConvention convention) {
    if (!(r_ua >= 0.0) || !(r1 >= 0.0)) throw std::invalid_argument("ranges must be nonnegative");
    const double base = 2.0 * r_ua / kSpeedOfLight;
    return convention == PriConvention::from_ris ? base + 2.0 * r1 / kSpeedOfLight : base;
}

inline double unambiguous_range_from_pri(double pri, double r1, PriConvention convention) {
    const double total = kSpeedOfLight * pri / 2.0;
    return convention == PriConvention::from_ris ? total - r1 : total;
}

inline double dwell_time(int pulses, double pri) {
    if (pulses < 1) throw std::invalid_argument("pulse count must be >= 1");
    return pulses * pri;
}

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
    double duration() const { return end - start; }
};

struct PulseEvents {
    TimeWindow transmit;
    TimeWindow idle;
    TimeWindow listen;
};

/// Timing of one coherent burst. Within each PRI: transmit [0, tau], idle
/// [tau, 2 r1 / c], listen [2 r1 / c, T]; the next pulse leaves at T.
struct DwellPlan {
    double pulse_length = 0.0;
    double r1 = 0.0;
    double unambiguous_range = 0.0;
    double pri = 0.0;
    int pulses = 1;
    PriConvention convention = PriConvention::from_radar;

    double dwell() const { return dwell_time(pulses, pri); }
    double ris_round_trip() const { return 2.0 * r1 / kSpeedOfLight; }

    /// Events of pulse `index` (zero-based), absolute times from burst start.
    PulseEvents pulse(int index) const {
        const double t0 = index * pri;
        return {{t0, t0 + pulse_length}, {t0 + pulse_length, t0 + ris_round_trip()}, {t0 + ris_round_trip(), t0 + pri}};
    }
};

inline DwellPlan build_dwell_plan(double pulse_length, double r1, double r_ua, int pulses,
                                  PriConvention convention = PriConvention::from_radar) {
    if (!(pulse_length > 0.0)) throw std::invalid_argument("pulse length must be positive");
    if (!(r1 > 0.0) || !(r_ua > 0.0)) throw std::invalid_argument("ranges must be positive");
    if (pulses < 1) throw std::invalid_argument("pulse count must be >= 1");
    if (!(pulse_length < 2.0 * r1 / kSpeedOfLight)) {
        throw std::domain_error("RIS too close: pulse still transmitting when the first RIS return arrives (tau=" +
                                std::to_string(pulse_length) + " s, 2r1/c=" +
                                std::to_string(2.0 * r1 / kSpeedOfLight) + " s)");
    }
    DwellPlan plan{pulse_length, r1, r_ua, pri_from_unambiguous_range(r_ua, r1, convention), pulses, convention};
    if (!(plan.ris_round_trip() < plan.pri)) {
        throw std::domain_error("unambiguous range does not extend beyond the RIS");
    }
    return plan;
}

enum class ScanMode { subregion1, subregion2 };

struct ScheduledDwell {
    ScanMode mode = ScanMode::subregion2;
    int beam = -1;         // index into the beam grid for sub-region-2 dwells
    Direction pointing;    // RIS pointing (sub-region 2 only)
    double edge_loss_db = 0.0;
    double start = 0.0;
    double duration = 0.0;
};

struct ScanSchedule {
    DwellPlan plan;
    std::vector<ScheduledDwell> dwells;
    int beam_count = 0;

    double frame_time() const {
        double t = 0.0;
        for (const auto& d : dwells) t += d.duration;
        return t;
    }
};

struct DwellInputs {
    double pulse_length = 1.5e-6;
    double r1 = 1000.0;
    double unambiguous_range = 10e3;
    int pulses = 64;
    PriConvention convention = PriConvention::from_radar;
};

/// Tiles the sector and visits the beams in order, one burst each. With a
/// nonzero `subregion1_share` an opaque sub-region-1 block follows every beam
/// so that sub-region 1 receives that fraction of the frame (round robin).
inline ScanSchedule build_scan_schedule(const AngularSector& sector, const RisPanel& panel, double lambda0,
                                        double max_edge_loss_db, const DwellInputs& in,
                                        double subregion1_share = 0.0) {
    if (!(subregion1_share >= 0.0 && subregion1_share < 1.0)) {
        throw std::invalid_argument("sub-region-1 share must lie in [0, 1)");
    }
    const BeamGrid grid = tile_sector(sector, panel, lambda0, max_edge_loss_db);
    ScanSchedule sched;
    sched.plan = build_dwell_plan(in.pulse_length, in.r1, in.unambiguous_range, in.pulses, in.convention);
    sched.beam_count = static_cast<int>(grid.size());
    const double td = sched.plan.dwell();
    const double block = td * subregion1_share / (1.0 - subregion1_share);
    double t = 0.0;
    for (std::size_t b = 0; b < grid.size(); ++b) {
        sched.dwells.push_back({ScanMode::subregion2, static_cast<int>(b), grid.beams[b].pointing,
                                grid.beams[b].worst_edge_loss_db, t, td});
        t += td;
        if (block > 0.0) {
            sched.dwells.push_back({ScanMode::subregion1, -1, {}, 0.0, t, block});
            t += block;
        }
    }
    return sched;
}

}  // namespace risradar
