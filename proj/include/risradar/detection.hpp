#pragma once

// Detection probability for nonfluctuating (Swerling 0) and Swerling 1
// targets, and the inverse query "how far can the RIS see at this Pd".

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "risradar/geometry.hpp"
#include "risradar/link_budget.hpp"

namespace risradar {

enum class SwerlingModel { sw0, sw1 };

struct DetectionSpec {
    double pfa = 1e-4;
    SwerlingModel model = SwerlingModel::sw0;

    void validate() const {
        if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("Pfa must lie in (0, 1)");
    }
};

namespace detail {
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// 1 - Q_1 = sum_k Pois(k; lam) P(Pois(y) > k). The Poisson upper tails are
// built by downward recurrence from a series value, so no subtraction occurs.
inline double marcum_q1_complement(double lam, double y) {
    const auto kmax = static_cast<long>(std::ceil(lam + 40.0 * std::sqrt(lam) + 50.0));
    const double log_y = std::log(y);
    // log P(Pois(y) >= kmax + 1) = log of the regularised lower gamma P(kmax + 1, y).
    double log_term = static_cast<double>(kmax + 1) * log_y - y - std::lgamma(static_cast<double>(kmax + 2));
    double log_series = 0.0, log_n = 0.0;
    for (long n = 1; n < 10'000'000; ++n) {
        log_n += log_y - std::log(static_cast<double>(kmax + 1 + n));
        log_series = log_add(log_series, log_n);
        if (static_cast<double>(kmax + 1 + n) > y && log_n < log_series - 40.0) break;
    }
    double log_tail = log_term + log_series;  // P(Pois(y) > k) at k = kmax
    double log_py = static_cast<double>(kmax) * log_y - y - std::lgamma(static_cast<double>(kmax + 1));  // Pois(kmax; y)
    double log_w = static_cast<double>(kmax) * std::log(lam) - lam - std::lgamma(static_cast<double>(kmax + 1));
    double log_s = log_w + log_tail;
    for (long k = kmax - 1; k >= 0; --k) {
        log_tail = log_add(log_tail, log_py);  // P(Pois(y) > k) = P(> k + 1) + Pois(k + 1; y)
        log_py += std::log(static_cast<double>(k + 1)) - log_y;
        log_w += std::log(static_cast<double>(k + 1)) - std::log(lam);
        log_s = log_add(log_s, log_w + log_tail);
    }
    return std::exp(log_s);
}
}  // namespace detail

/// First-order Marcum Q function Q_1(a, b).
///
/// Evaluated as the Poisson mixture Q_1 = sum_k Pois(k; a^2/2) P(Pois(b^2/2) <= k),
/// i.e. P(J >= I) for independent Poisson J, I. Every term is positive, so the
/// sum has full relative accuracy; it is accumulated in the log domain and
/// cannot overflow. The sum stops once the remaining Poisson tail (bounded
/// geometrically past the mode) is below 1e-16 of the running sum. When the
/// result exceeds 0.5 the complement is summed instead, so Pd values close to
/// 1 stay monotone and accurate.
inline double marcum_q1(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw std::domain_error("Marcum Q arguments must be nonnegative");
    if (b == 0.0) return 1.0;
    if (a - b > 40.0) return 1.0;  // 1 - Q_1 <= exp(-(a-b)^2/2)
    const double lam = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (lam == 0.0) return std::exp(-y);

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const double log_lam = std::log(lam), log_y = std::log(y);
    double log_w = -lam;   // log Pois(k; lam)
    double log_p = -y;     // log Pois(k; y)
    double log_g = -y;     // log P(Pois(y) <= k)
    double log_s = neg_inf;
    for (long k = 0;; ++k) {
        if (k > 0) {
            const double lk = std::log(static_cast<double>(k));
            log_w += log_lam - lk;
            log_p += log_y - lk;
            log_g = detail::log_add(log_g, log_p);
            log_g = std::min(log_g, 0.0);
        }
        log_s = detail::log_add(log_s, log_w + log_g);
        const double ratio = lam / static_cast<double>(k + 1);
        if (static_cast<double>(k) > lam && ratio < 1.0) {
            const double log_tail = log_w + std::log(ratio) - std::log1p(-ratio);
            if (log_tail < log_s - 37.0) break;
        }
        if (k > 100'000'000) break;
    }
    const double q = std::exp(log_s);
    return q > 0.5 ? 1.0 - detail::marcum_q1_complement(lam, y) : q;
}

inline double pd_sw0(double snr, double pfa) {
    if (!(snr >= 0.0)) throw std::domain_error("SNR must be nonnegative");
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("Pfa must lie in (0, 1)");
    return marcum_q1(std::sqrt(2.0 * snr), std::sqrt(-2.0 * std::log(pfa)));
}

inline double pd_sw1(double snr, double pfa) {
    if (!(snr >= 0.0)) throw std::domain_error("SNR must be nonnegative");
    if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("Pfa must lie in (0, 1)");
    return std::pow(pfa, 1.0 / (1.0 + snr));
}

inline double probability_of_detection(double snr, const DetectionSpec& spec) {
    return spec.model == SwerlingModel::sw0 ? pd_sw0(snr, spec.pfa) : pd_sw1(snr, spec.pfa);
}

struct RangeSearch {
    double floor = 0.0;      // m; 0 selects the far-field distance of the panel
    double ceiling = 1e6;    // m
    double tolerance = 0.1;  // m
};

/// Largest r2 at which Pd >= target_pd, with the target kept along the scene's
/// RIS-relative direction and the panel phase-matched to that direction.
/// Returns nullopt when even the search floor does not reach `target_pd`; the
/// ceiling is returned when it is still met there.
inline std::optional<double> max_range_for_pd(double target_pd, const DetectionSpec& spec, const RadarSystem& radar,
                                              const RisPanel& panel, const SceneGeometry& scene, double rcs,
                                              int pulses, const LossLedger& ledger, RangeSearch search = {}) {
    spec.validate();
    if (!(target_pd > spec.pfa && target_pd < 1.0)) throw std::invalid_argument("target Pd must lie in (Pfa, 1)");
    const double lambda0 = radar.wavelength();
    const auto gamma = phase_matched_program(scene.radar_from_ris(), scene.target_from_ris(), panel, lambda0);
    const ComplexMatrix sigma = scene_sigma(scene, panel, gamma, lambda0);
    const auto pd_at = [&](double r2) {
        const double s1 = snr_single_pulse(radar, panel, scene.with_target_range(r2), sigma, rcs);
        return probability_of_detection(snr_coherent(s1, pulses, ledger), spec);
    };
    double lo = search.floor > 0.0 ? search.floor : far_field_distance(panel, lambda0);
    double hi = search.ceiling;
    if (pd_at(lo) < target_pd) return std::nullopt;
    if (pd_at(hi) >= target_pd) return hi;
    while (hi - lo > search.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (pd_at(mid) >= target_pd ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace risradar
