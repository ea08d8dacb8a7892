#pragma once

// Radar range equation for the radar -> RIS -> target -> RIS -> radar link.
// Gains and losses are linear throughout; dB appears only at the CLI.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "risradar/constants.hpp"
#include "risradar/geometry.hpp"
#include "risradar/pattern.hpp"

namespace risradar {

struct RadarSystem {
    double peak_power = db_to_linear(26.0);       // W
    double tx_gain = db_to_linear(38.0);          // linear
    double carrier = 10e9;                        // Hz
    double bandwidth = 10e6;                      // Hz
    double pulse_length = 1.5e-6;                 // s
    double noise_figure = db_to_linear(2.5);      // linear
    double temperature = kStandardTemperature;    // K
    /// Normalised power pattern in the radar frame; 1 everywhere by default.
    std::function<double(const Direction&)> pattern = [](const Direction&) { return 1.0; };

    double wavelength() const { return kSpeedOfLight / carrier; }
    double average_power(double pri) const { return peak_power * pulse_length / pri; }
    double noise_density() const { return kBoltzmann * temperature * noise_figure; }

    void validate() const {
        if (!(peak_power > 0.0)) throw std::invalid_argument("radar peak power must be positive");
        if (!(tx_gain > 0.0)) throw std::invalid_argument("radar gain must be positive");
        if (!(carrier > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
        if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
        if (!(pulse_length > 0.0)) throw std::invalid_argument("pulse length must be positive");
        if (!(noise_figure > 0.0)) throw std::invalid_argument("noise figure must be positive");
        if (!(bandwidth * pulse_length >= 1.0 - 1e-12)) {
            throw std::invalid_argument("time-bandwidth product B*tau must be >= 1");
        }
    }
};

/// Linear loss factors, each >= 1.
struct LossLedger {
    double transmit = 1.0;
    double atmospheric1 = 1.0;  // two-way, radar <-> RIS
    double atmospheric2 = 1.0;  // two-way, RIS <-> target
    double receive = 1.0;
    double processing = 1.0;
    double ris = 1.0;

    double atmospheric() const { return atmospheric1 * atmospheric2; }
    double total() const { return transmit * atmospheric() * receive * processing * ris; }
    /// Losses that scale the echo amplitude (everything except processing).
    double propagation() const { return transmit * atmospheric() * receive * ris; }

    void validate() const {
        for (double f : {transmit, atmospheric1, atmospheric2, receive, processing, ris}) {
            if (!(f >= 1.0)) throw std::invalid_argument("loss factors must be >= 1");
        }
    }
};

inline double far_field_distance(const RisPanel& panel, double lambda0) {
    const double d = std::max(panel.aperture_x(), panel.aperture_y());
    return 2.0 * d * d / lambda0;
}

struct FarFieldWarning {
    double r1;
    double r2;
    double far_field_distance;

    std::string message() const {
        return "range below RIS far-field distance (r1=" + std::to_string(r1) + " m, r2=" + std::to_string(r2) +
               " m, FFD=" + std::to_string(far_field_distance) + " m)";
    }
};

inline std::optional<FarFieldWarning> far_field_check(const RisPanel& panel, double lambda0, double r1,
                                                      double r2) {
    const double ffd = far_field_distance(panel, lambda0);
    if (r1 < ffd || r2 < ffd) return FarFieldWarning{r1, r2, ffd};
    return std::nullopt;
}

/// F^R(theta_R, phi_R) F(theta_RIS^R) F(theta_RIS^Ta).
inline double total_pattern_factor(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene) {
    return radar.pattern(scene.ris_from_radar()) *
           patch_pattern(scene.radar_from_ris().theta, panel.pattern_exponent()) *
           patch_pattern(scene.target_from_ris().theta, panel.pattern_exponent());
}

/// Power density (W/m^2) incident on the target.
inline double power_density_at_target(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                      const ComplexMatrix& sigma) {
    const double r1 = scene.r1(), r2 = scene.r2();
    const double coherent = std::norm(sigma.sum());
    return radar.tx_gain * radar.peak_power * panel.patch_gain() * total_pattern_factor(radar, panel, scene) *
           panel.dx() * panel.dy() * panel.efficiency() / (16.0 * kPi * kPi * r1 * r1 * r2 * r2) * coherent;
}

/// Received peak power (W) for a target of RCS `rcs`, same program on both paths.
inline double received_power(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                             const ComplexMatrix& sigma, double rcs) {
    if (!(rcs >= 0.0)) throw std::invalid_argument("RCS must be nonnegative");
    const double lambda0 = radar.wavelength();
    const double r1 = scene.r1(), r2 = scene.r2();
    const double ftot = total_pattern_factor(radar, panel, scene);
    const double g = radar.tx_gain * panel.patch_gain() * ftot * panel.dx() * panel.dy() * panel.efficiency();
    const double pattern = induced_pattern_direct(sigma);
    return g * g * radar.peak_power * lambda0 * lambda0 * rcs /
           (std::pow(r1, 4) * std::pow(r2, 4) * std::pow(4.0 * kPi, 5)) * pattern;
}

/// Which noise normalisation to use for the single-pulse SNR: k T0 F_N / tau
/// (matched-filter energy form, valid for modulated pulses) or k T0 B F_N.
enum class NoiseForm { pulse_length, bandwidth };

inline double snr_single_pulse(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                               const ComplexMatrix& sigma, double rcs, NoiseForm form = NoiseForm::pulse_length) {
    const double prx = received_power(radar, panel, scene, sigma, rcs);
    const double kt = radar.noise_density();
    return form == NoiseForm::pulse_length ? prx * radar.pulse_length / kt : prx / (kt * radar.bandwidth);
}

inline double snr_coherent(double snr1, int pulses, const LossLedger& ledger) {
    if (pulses < 1) throw std::invalid_argument("pulse count must be >= 1");
    return snr1 * pulses / ledger.total();
}

/// Average-power form with dwell time `dwell` = Np * `pri`. The dwell must be
/// an integer number of PRIs to within 1e-3 relative (tabulated dwell times
/// are rounded).
inline double snr_average_power_form(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                     const ComplexMatrix& sigma, double rcs, double pri, double dwell,
                                     const LossLedger& ledger) {
    if (!(pri > 0.0) || !(dwell > 0.0)) throw std::invalid_argument("PRI and dwell must be positive");
    const double ratio = dwell / pri;
    const double np = std::round(ratio);
    if (np < 1.0 || std::abs(ratio - np) > 1e-3 * np) {
        throw std::invalid_argument("dwell time is not an integer number of PRIs");
    }
    const double lambda0 = radar.wavelength();
    const double r1 = scene.r1(), r2 = scene.r2();
    const double ftot = total_pattern_factor(radar, panel, scene);
    const double g = radar.tx_gain * panel.patch_gain() * ftot * panel.dx() * panel.dy() * panel.efficiency();
    const double pavg = radar.average_power(pri);
    return g * g * lambda0 * lambda0 * rcs * pavg * dwell /
           (std::pow(r1, 4) * std::pow(r2, 4) * std::pow(4.0 * kPi, 5) * radar.noise_density() * ledger.total()) *
           induced_pattern_direct(sigma);
}

/// Equivalent monostatic radar: same SNR at range r1 + r2 with an equivalent
/// gain and loss budget.
struct EquivalentMonostatic {
    double rcs_factor = 1.0;       // sigma_eq / sigma
    double tx_gain = 0.0;          // G_T G eta N^2 M^2
    double processing_loss = 0.0;  // L_sp (NM)^4 / (F_tot^2 |1^T Sigma 1|^4)
    double ris_loss = 0.0;         // L_ris pi^2
    double geometric_loss = 0.0;   // fourth power of harmonic-mean range over patch size
    double system_loss = 0.0;      // L_t L_atm L_r L_sp^eq L_ris^eq L_geom
    double total_range = 0.0;      // r1 + r2
    double phi_bar_ris = 0.0;
    double phi_bar = 0.0;          // equivalent azimuth beamwidth
};

inline EquivalentMonostatic equivalent_monostatic(const RadarSystem& radar, const RisPanel& panel,
                                                  const SceneGeometry& scene, const ComplexMatrix& sigma,
                                                  const LossLedger& ledger) {
    const double r1 = scene.r1(), r2 = scene.r2();
    const double nm = static_cast<double>(panel.n()) * panel.m();
    const double ftot = total_pattern_factor(radar, panel, scene);
    const double patch = std::sqrt(panel.dx() * panel.dy());

    EquivalentMonostatic eq;
    eq.tx_gain = radar.tx_gain * panel.patch_gain() * panel.efficiency() * nm * nm;
    eq.processing_loss = ledger.processing * std::pow(nm, 4) / (ftot * ftot * induced_pattern_direct(sigma));
    eq.ris_loss = ledger.ris * kPi * kPi;
    eq.geometric_loss = std::pow(2.0 / (patch / r1 + patch / r2), 4);
    eq.system_loss = ledger.transmit * ledger.atmospheric() * ledger.receive * eq.processing_loss * eq.ris_loss *
                     eq.geometric_loss;
    eq.total_range = r1 + r2;
    eq.phi_bar_ris = beamwidths(panel, radar.wavelength(), scene.target_from_ris()).phi_bar;
    eq.phi_bar = eq.phi_bar_ris * r2 / (r1 + r2);
    return eq;
}

/// Coherent SNR evaluated through the equivalent monostatic configuration.
inline double snr_equivalent_monostatic(const EquivalentMonostatic& eq, const RadarSystem& radar, double rcs,
                                        int pulses) {
    const double lambda0 = radar.wavelength();
    return eq.tx_gain * eq.tx_gain * radar.peak_power * lambda0 * lambda0 * rcs * eq.rcs_factor * pulses *
           radar.pulse_length /
           (std::pow(eq.total_range, 4) * std::pow(4.0 * kPi, 3) * radar.noise_density() * eq.system_loss);
}

/// Standard monostatic coherent SNR at `range` (energy form).
inline double monostatic_snr(const RadarSystem& radar, double range, double rcs, int pulses, double loss) {
    const double lambda0 = radar.wavelength();
    return radar.peak_power * radar.tx_gain * radar.tx_gain * lambda0 * lambda0 * rcs * radar.pulse_length * pulses /
           (std::pow(4.0 * kPi, 3) * std::pow(range, 4) * radar.noise_density() * loss);
}

enum class ClairvoyantRange { sum, root_sum_square };

struct SnrLoss {
    double loss_db = 0.0;
    double reference_range = 0.0;
    std::optional<FarFieldWarning> far_field;
};

/// SNR of an unobstructed monostatic radar at r1 + r2 (or sqrt(r1^2 + r2^2))
/// over the RIS-assisted SNR. The reference applies L_t L_atm L_r L_sp, plus
/// L_ris when `reference_includes_ris_loss`.
inline SnrLoss snr_loss_vs_clairvoyant(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                       const ComplexMatrix& sigma, double rcs, const LossLedger& ledger,
                                       ClairvoyantRange convention, bool reference_includes_ris_loss = false) {
    const double r1 = scene.r1(), r2 = scene.r2();
    const double range = convention == ClairvoyantRange::sum ? r1 + r2 : std::hypot(r1, r2);
    double ref_loss = ledger.transmit * ledger.atmospheric() * ledger.receive * ledger.processing;
    if (reference_includes_ris_loss) ref_loss *= ledger.ris;
    const double snr_ris = snr_coherent(snr_single_pulse(radar, panel, scene, sigma, rcs), 1, ledger);
    const double snr_ref = monostatic_snr(radar, range, rcs, 1, ref_loss);
    return {linear_to_db(snr_ref / snr_ris), range, far_field_check(panel, radar.wavelength(), r1, r2)};
}

}  // namespace risradar
