#pragma once

// Signal-level simulation of RIS-relayed echoes: burst synthesis, noise,
// pulse compression, the fast-time/slow-time matrix and range-Doppler maps.
//
// Sample streams are complex baseband with |x|^2 in watts. The baseband pulse
// p(t) has unit energy; a transmitted pulse is sqrt(P_T * tau) p(t), so that
// P_T stays the peak power and the matched-filter output peak of an echo with
// received power P_rx is sqrt(P_rx * tau). Echoes use the band-limited
// reconstruction of the sampled template, so a delay that is not a whole
// number of samples costs no correlation gain.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "risradar/constants.hpp"
#include "risradar/geometry.hpp"
#include "risradar/link_budget.hpp"
#include "risradar/parallel.hpp"
#include "risradar/timeline.hpp"

namespace risradar {

using cplx = std::complex<double>;

/// Kaiser-windowed sinc kernel (half-width 24 samples, beta 8.6), tabulated
/// at 8192 points per sample and linearly interpolated.
class KaiserSinc {
public:
    static constexpr int half_width = 24;

    static const KaiserSinc& instance() {
        static const KaiserSinc k;
        return k;
    }

    double operator()(double d) const {
        const double a = std::abs(d) * kSteps;
        if (a >= static_cast<double>(table_.size() - 1)) return 0.0;
        const auto i = static_cast<std::size_t>(a);
        const double f = a - static_cast<double>(i);
        return table_[i] + f * (table_[i + 1] - table_[i]);
    }

    /// sum_k x[k] K(pos - k) over the kernel support; exact on integer pos.
    cplx interpolate(const cplx* x, std::size_t n, double pos) const {
        const double r = std::round(pos);
        if (std::abs(pos - r) < 1e-9) {
            const auto k = static_cast<long>(r);
            return (k >= 0 && k < static_cast<long>(n)) ? x[k] : cplx{};
        }
        const auto base = static_cast<long>(std::floor(pos));
        const long lo = std::max(0L, base - half_width + 1);
        const long hi = std::min(static_cast<long>(n) - 1, base + half_width);
        cplx acc{};
        for (long k = lo; k <= hi; ++k) acc += x[k] * (*this)(pos - static_cast<double>(k));
        return acc;
    }

private:
    static constexpr int kSteps = 8192;
    static constexpr double kBeta = 8.6;

    KaiserSinc() : table_(static_cast<std::size_t>(half_width * kSteps + 2)) {
        const double i0 = std::cyl_bessel_i(0.0, kBeta);
        for (std::size_t i = 0; i < table_.size(); ++i) {
            const double d = static_cast<double>(i) / kSteps;
            const double r = d / half_width;
            if (r >= 1.0) continue;
            const double sinc = d == 0.0 ? 1.0 : std::sin(kPi * d) / (kPi * d);
            table_[i] = sinc * std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) / i0;
        }
    }

    std::vector<double> table_;
};

enum class PulseKind { unmodulated, lfm };

class PulseWaveform {
public:
    /// `min_oversampling` is the required fs / B margin.
    PulseWaveform(PulseKind kind, double tau, double bandwidth, double fs, double min_oversampling = 2.0)
        : kind_(kind), tau_(tau), bandwidth_(bandwidth), fs_(fs) {
        if (!(tau > 0.0) || !(bandwidth > 0.0) || !(fs > 0.0)) {
            throw std::invalid_argument("pulse duration, bandwidth and sample rate must be positive");
        }
        if (!(fs >= min_oversampling * bandwidth * (1.0 - 1e-12))) {
            throw std::invalid_argument("sample rate below the required oversampling of the pulse bandwidth");
        }
        const long n = std::max(1L, std::lround(tau * fs));
        samples_.resize(static_cast<std::size_t>(n));
        double energy = 0.0;
        for (long k = 0; k < n; ++k) {
            samples_[static_cast<std::size_t>(k)] = shape(k / fs);
            energy += std::norm(samples_[static_cast<std::size_t>(k)]) / fs;
        }
        scale_ = 1.0 / std::sqrt(energy);
        for (auto& s : samples_) s *= scale_;
    }

    PulseKind kind() const { return kind_; }
    double duration() const { return tau_; }
    double bandwidth() const { return bandwidth_; }
    double sample_rate() const { return fs_; }
    std::size_t length() const { return samples_.size(); }

    /// Sampled template p(k / fs), normalised to unit energy.
    const std::vector<cplx>& samples() const { return samples_; }

    /// Continuous pulse with the same normalisation as the template; zero
    /// outside [0, tau).
    cplx operator()(double t) const { return (t < 0.0 || t >= tau_) ? cplx{} : scale_ * shape(t); }

    /// Band-limited reconstruction of the template at time t (the ideal DAC
    /// output); nonzero on (-24, L + 24) samples and equal to the template at
    /// sample instants.
    cplx bandlimited(double t) const {
        return KaiserSinc::instance().interpolate(samples_.data(), samples_.size(), t * fs_);
    }

    /// Unnormalised analytic unit-energy pulse.
    cplx analytic(double t) const { return (t < 0.0 || t >= tau_) ? cplx{} : shape(t); }

    double numeric_energy() const {
        double e = 0.0;
        for (const auto& s : samples_) e += std::norm(s);
        return e / fs_;
    }

private:
    cplx shape(double t) const {
        const double amp = 1.0 / std::sqrt(tau_);
        if (kind_ == PulseKind::unmodulated) return {amp, 0.0};
        const double x = t - tau_ / 2.0;
        return std::polar(amp, kPi * bandwidth_ / tau_ * x * x);
    }

    PulseKind kind_;
    double tau_;
    double bandwidth_;
    double fs_;
    double scale_ = 1.0;
    std::vector<cplx> samples_;
};

struct SampleStream {
    double fs = 1.0;
    std::vector<cplx> data;

    std::size_t size() const { return data.size(); }
    double time(std::size_t k) const { return static_cast<double>(k) / fs; }
    double energy() const {
        double e = 0.0;
        for (const auto& x : data) e += std::norm(x);
        return e / fs;
    }
};

/// Sample-index window [first, last) where a band-limited pulse starting at
/// `start` seconds is nonzero.
inline std::pair<long, long> pulse_support(const PulseWaveform& wf, double start) {
    const double x = start * wf.sample_rate();
    const long h = KaiserSinc::half_width;
    return {static_cast<long>(std::ceil(x - 1e-9)) - h + 1,
            static_cast<long>(std::floor(x + 1e-9)) + static_cast<long>(wf.length()) + h};
}

/// Np replicas of sqrt(P_T tau) p(t - (i-1) T) over [0, Np T).
inline SampleStream generate_burst(const PulseWaveform& wf, int pulses, double pri, double peak_power) {
    if (pulses < 1) throw std::invalid_argument("pulse count must be >= 1");
    if (!(pri >= wf.duration())) throw std::invalid_argument("PRI shorter than the pulse");
    SampleStream s;
    s.fs = wf.sample_rate();
    s.data.assign(static_cast<std::size_t>(std::ceil(pulses * pri * s.fs)), cplx{});
    const double amp = std::sqrt(peak_power * wf.duration());
    const long n = static_cast<long>(s.size());
    for (int i = 0; i < pulses; ++i) {
        const double t0 = i * pri;
        const auto [k0, k1] = pulse_support(wf, t0);
        for (long k = std::max(0L, k0); k < std::min(n, k1); ++k) {
            s.data[static_cast<std::size_t>(k)] += amp * wf.bandlimited(s.time(static_cast<std::size_t>(k)) - t0);
        }
    }
    return s;
}

/// Ground truth of one scatterer as seen through the RIS.
struct TargetTruth {
    double r1 = 0.0;
    double r2 = 0.0;
    double radial_velocity = 0.0;     // along the RIS -> target line, positive closing
    double doppler = 0.0;             // Hz
    double normalized_doppler = 0.0;  // doppler * PRI
    double delay = 0.0;               // 2 (r1 + r2) / c
    double one_hop_delay = 0.0;       // (r1 + 2 r2) / c
    cplx amplitude{};                 // sqrt(P_rx / (L_t L_atm L_r L_ris)) e^{j phase}
    double received_power = 0.0;      // W, from the link budget

    bool doppler_ambiguous() const { return std::abs(normalized_doppler) >= 0.5; }
};

/// Builds the truth record of a target in `scene` moving with `velocity`.
/// The phase collects `phase` and, when `carrier_phase`, the two-way carrier
/// term -2 pi f0 tau0.
inline TargetTruth make_target_truth(const RadarSystem& radar, const RisPanel& panel, const SceneGeometry& scene,
                                     const ComplexMatrix& sigma, double rcs, const Vec3& velocity,
                                     const LossLedger& ledger, double pri, double phase = 0.0,
                                     bool carrier_phase = true) {
    TargetTruth t;
    t.r1 = scene.r1();
    t.r2 = scene.r2();
    const Vec3 los = (scene.ris_position() - scene.target_position()) / scene.r2();
    t.radial_velocity = los.dot(velocity);
    const double lambda0 = radar.wavelength();
    t.doppler = 2.0 * t.radial_velocity / lambda0;
    t.normalized_doppler = t.doppler * pri;
    t.delay = 2.0 * (t.r1 + t.r2) / kSpeedOfLight;
    t.one_hop_delay = (t.r1 + 2.0 * t.r2) / kSpeedOfLight;
    t.received_power = received_power(radar, panel, scene, sigma, rcs);
    double ph = phase;
    if (carrier_phase) ph -= 2.0 * kPi * std::fmod(2.0 * (t.r1 + t.r2) / lambda0, 1.0);
    t.amplitude = std::polar(std::sqrt(t.received_power / ledger.propagation()), ph);
    return t;
}

/// Truth for a point scatterer given directly by range, Doppler and amplitude.
inline TargetTruth make_point_truth(double r1, double r2, double doppler, cplx amplitude, double pri,
                                    double lambda0) {
    TargetTruth t;
    t.r1 = r1;
    t.r2 = r2;
    t.doppler = doppler;
    t.radial_velocity = doppler * lambda0 / 2.0;
    t.normalized_doppler = doppler * pri;
    t.delay = 2.0 * (r1 + r2) / kSpeedOfLight;
    t.one_hop_delay = (r1 + 2.0 * r2) / kSpeedOfLight;
    t.amplitude = amplitude;
    t.received_power = std::norm(amplitude);
    return t;
}

/// Receive timing shared by the synthesis, noise and processing stages.
struct BurstTiming {
    int pulses = 1;
    double pri = 0.0;
    double fs = 1.0;
    std::size_t length = 0;  // samples in the receive stream

    /// Slow-time segment (pulse index) owning sample k; the last segment also
    /// owns everything past Np T.
    std::size_t segment_of(std::size_t k) const {
        const auto l = static_cast<std::size_t>(std::floor(static_cast<double>(k) / fs / pri));
        return std::min<std::size_t>(l, static_cast<std::size_t>(pulses - 1));
    }
    std::size_t segment_begin(std::size_t l) const {
        if (l == 0) return 0;
        auto k = static_cast<std::size_t>(std::ceil(l * pri * fs));
        while (k > 0 && segment_of(k - 1) >= l) --k;
        while (k < length && segment_of(k) < l) ++k;
        return std::min(k, length);
    }
    std::size_t segment_end(std::size_t l) const {
        return l + 1 >= static_cast<std::size_t>(pulses) ? length : segment_begin(l + 1);
    }
};

/// Adds the echoes of `targets` to `stream` under stop-and-hop: pulse i is
/// delayed by tau0 + (i-1) T and carries e^{j 2 pi f_d t} (absolute time, so
/// both the pulse-to-pulse rotation e^{j 2 pi nu (i-1)} and the intra-pulse
/// Doppler are exact). Work is split by slow-time segment.
inline void synthesize_target_echo(SampleStream& stream, const BurstTiming& timing, const PulseWaveform& wf,
                                   std::span<const TargetTruth> targets, unsigned threads = 0) {
    const double tau = wf.duration();
    parallel_for(static_cast<std::size_t>(timing.pulses), threads, [&](std::size_t l) {
        const std::size_t kb = timing.segment_begin(l), ke = timing.segment_end(l);
        for (const auto& tg : targets) {
            const cplx a = tg.amplitude * std::sqrt(tau);
            for (int i = 0; i < timing.pulses; ++i) {
                const double start = tg.delay + i * timing.pri;
                const auto [k0, k1] = pulse_support(wf, start);
                const long lo = std::max(k0, static_cast<long>(kb));
                const long hi = std::min(k1, static_cast<long>(ke));
                for (long k = lo; k < hi; ++k) {
                    const double t = stream.time(static_cast<std::size_t>(k));
                    const cplx p = wf.bandlimited(t - start);
                    if (p == cplx{}) continue;
                    stream.data[static_cast<std::size_t>(k)] +=
                        a * p * std::polar(1.0, 2.0 * kPi * std::fmod(tg.doppler * t, 1.0));
                }
            }
        }
    });
}

/// Seeded generator for one slow-time segment; independent of thread layout.
inline std::mt19937_64 segment_rng(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t segment) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(segment),
                      static_cast<std::uint32_t>(segment >> 32)};
    return std::mt19937_64(seq);
}

/// Circular white Gaussian noise of one-sided density `noise_density` (W/Hz),
/// i.e. per-sample power noise_density * fs.
inline void add_noise(SampleStream& stream, const BurstTiming& timing, double noise_density, std::uint64_t seed,
                      unsigned threads = 0) {
    const double sigma = std::sqrt(noise_density * stream.fs / 2.0);
    if (sigma == 0.0) return;
    parallel_for(static_cast<std::size_t>(timing.pulses), threads, [&](std::size_t l) {
        auto rng = segment_rng(seed, 1, l);
        std::normal_distribution<double> g(0.0, sigma);
        for (std::size_t k = timing.segment_begin(l); k < timing.segment_end(l); ++k) {
            const double re = g(rng);
            const double im = g(rng);
            stream.data[k] += cplx(re, im);
        }
    });
}

/// Matched filter z(t) = int x(s) p*(s - t) ds on the sample grid; z[m] is the
/// output for a delay of m / fs. Same length as the input.
inline SampleStream pulse_compress(const SampleStream& x, const PulseWaveform& wf, unsigned threads = 0) {
    SampleStream z;
    z.fs = x.fs;
    z.data.assign(x.size(), cplx{});
    const auto& p = wf.samples();
    const std::size_t np = p.size();
    std::vector<cplx> pc(np);
    for (std::size_t n = 0; n < np; ++n) pc[n] = std::conj(p[n]) / x.fs;
    constexpr std::size_t block = 4096;
    const std::size_t blocks = (x.size() + block - 1) / block;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t m0 = b * block, m1 = std::min(x.size(), m0 + block);
        for (std::size_t m = m0; m < m1; ++m) {
            cplx acc{};
            const std::size_t len = std::min(np, x.size() - m);
            for (std::size_t n = 0; n < len; ++n) acc += x.data[m + n] * pc[n];
            z.data[m] = acc;
        }
    });
    return z;
}

/// chi_p(t1, fd) = int p(t) p*(t - t1) e^{j 2 pi fd t} dt by composite Simpson
/// quadrature of the analytic pulse.
inline cplx ambiguity_function(const PulseWaveform& wf, double t1, double fd, int intervals = 4096) {
    const double a = std::max(0.0, t1), b = std::min(wf.duration(), wf.duration() + t1);
    if (!(b > a)) return {};
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    // Keep sample points strictly inside [0, tau) for the half-open pulse support.
    const auto f = [&](double t) {
        t = std::min(t, std::nextafter(b, a));
        const double s = std::min(t - t1, std::nextafter(wf.duration(), 0.0));
        return wf.analytic(t) * std::conj(wf.analytic(std::max(0.0, s))) * std::polar(1.0, 2.0 * kPi * fd * t);
    };
    cplx sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

/// Band-limited interpolation of a uniformly sampled stream.
class SincInterpolator {
public:
    cplx operator()(const SampleStream& s, double t) const {
        return KaiserSinc::instance().interpolate(s.data.data(), s.size(), t * s.fs);
    }
};

/// Fast-time x slow-time matrix after pulse compression.
struct DataMatrix {
    Eigen::MatrixXcd d;  // rows: fast time h, cols: slow time l
    double r1 = 0.0;
    double r2_min = 0.0;      // r2^b
    double bandwidth = 0.0;
    double pri = 0.0;
    double fs = 0.0;
    int h_max = 0;
    int oversample = 1;

    Eigen::Index rows() const { return d.rows(); }
    Eigen::Index cols() const { return d.cols(); }
    double range_bin() const { return kSpeedOfLight / (2.0 * bandwidth); }
    /// RIS-relative range sampled by row h (zero-based).
    double row_range(Eigen::Index h) const { return r2_min + static_cast<double>(h) * range_bin() / oversample; }
    /// Sampling instant of entry (h, l), zero-based.
    double instant(Eigen::Index h, Eigen::Index l) const {
        return 2.0 * (r1 + r2_min) / kSpeedOfLight + static_cast<double>(h) / (bandwidth * oversample) +
               static_cast<double>(l) * pri;
    }
};

/// h_max from r1 + r2^b + h_max * c / (2B) = R_ua (rounded down to whole bins).
inline int data_matrix_hmax(double r1, double r2_min, double r_ua, double bandwidth) {
    if (!(r2_min >= 0.0)) throw std::invalid_argument("minimum operative range must be nonnegative");
    if (!(r2_min < r_ua - r1)) throw std::domain_error("minimum operative range beyond the unambiguous range");
    const double bin = kSpeedOfLight / (2.0 * bandwidth);
    return static_cast<int>(std::floor((r_ua - r1 - r2_min) / bin + 1e-9));
}

/// Samples the compressed stream at the D(h, l) instants. With `oversample` >
/// 1 the fast-time step is 1 / (B * oversample) (for resolution studies).
inline DataMatrix build_data_matrix(const SampleStream& compressed, const DwellPlan& plan, double r2_min,
                                    double bandwidth, int oversample = 1, unsigned threads = 0) {
    if (oversample < 1) throw std::invalid_argument("oversampling factor must be >= 1");
    DataMatrix dm;
    dm.r1 = plan.r1;
    dm.r2_min = r2_min;
    dm.bandwidth = bandwidth;
    dm.pri = plan.pri;
    dm.fs = compressed.fs;
    dm.oversample = oversample;
    dm.h_max = data_matrix_hmax(plan.r1, r2_min, plan.unambiguous_range, bandwidth);
    const Eigen::Index rows = static_cast<Eigen::Index>(dm.h_max) * oversample + 1;
    dm.d.resize(rows, plan.pulses);
    const double last = dm.instant(rows - 1, plan.pulses - 1);
    if (last * compressed.fs > static_cast<double>(compressed.size())) {
        throw std::invalid_argument("compressed stream does not span the listening windows");
    }
    const SincInterpolator interp;
    parallel_for(static_cast<std::size_t>(plan.pulses), threads, [&](std::size_t l) {
        for (Eigen::Index h = 0; h < rows; ++h) {
            dm.d(h, static_cast<Eigen::Index>(l)) = interp(compressed, dm.instant(h, static_cast<Eigen::Index>(l)));
        }
    });
    return dm;
}

/// |DFT over slow time|^2 per range row; column k is normalised Doppler k / Np.
inline Eigen::MatrixXd range_doppler_map(const DataMatrix& dm, unsigned threads = 0) {
    const Eigen::Index np = dm.cols();
    if (np < 2) throw std::invalid_argument("range-Doppler processing needs at least two pulses");
    std::vector<cplx> twiddle(static_cast<std::size_t>(np));
    for (Eigen::Index n = 0; n < np; ++n) {
        twiddle[static_cast<std::size_t>(n)] = std::polar(1.0, -2.0 * kPi * static_cast<double>(n) / np);
    }
    Eigen::MatrixXd map(dm.rows(), np);
    parallel_for(static_cast<std::size_t>(dm.rows()), threads, [&](std::size_t hi) {
        const auto h = static_cast<Eigen::Index>(hi);
        for (Eigen::Index k = 0; k < np; ++k) {
            cplx acc{};
            for (Eigen::Index l = 0; l < np; ++l) acc += dm.d(h, l) * twiddle[static_cast<std::size_t>((k * l) % np)];
            map(h, k) = std::norm(acc);
        }
    });
    return map;
}

struct Resolution {
    double range = 0.0;    // m
    double doppler = 0.0;  // Hz
};

inline Resolution resolution_report(const RadarSystem& radar, const DwellPlan& plan) {
    return {kSpeedOfLight / (2.0 * radar.bandwidth), 1.0 / (plan.pulses * plan.pri)};
}

struct ClutterInjection {
    double power = 0.0;   // received clutter power C, W
    double range = 0.0;   // r2 of the clutter ring, m
    int scatterers = 64;
};

struct SimulationSetup {
    PulseWaveform waveform;
    DwellPlan plan;
    double r2_min = 0.0;
    double noise_density = 0.0;       // W/Hz; 0 disables noise
    double propagation_loss = 1.0;    // L_t L_atm L_r L_ris, for clutter scaling
    std::optional<ClutterInjection> clutter;
    std::uint64_t seed = 1;
    int oversample = 1;
    unsigned threads = 0;
};

struct SimulationResult {
    DataMatrix data;
    std::vector<TargetTruth> truth;
    BurstTiming timing;
};

/// Receive-stream timing covering every D sampling instant plus the
/// interpolator support.
inline BurstTiming receive_timing(const SimulationSetup& s) {
    BurstTiming t;
    t.pulses = s.plan.pulses;
    t.pri = s.plan.pri;
    t.fs = s.waveform.sample_rate();
    const double span = (s.plan.pulses - 1) * s.plan.pri + 2.0 * s.plan.unambiguous_range / kSpeedOfLight +
                        s.waveform.duration();
    t.length = static_cast<std::size_t>(std::ceil(span * t.fs)) + 64;
    return t;
}

/// Echoes (+ optional clutter ring) -> noise -> matched filter -> D.
inline SimulationResult simulate(const SimulationSetup& s, std::span<const TargetTruth> targets) {
    SimulationResult out;
    out.timing = receive_timing(s);
    out.truth.assign(targets.begin(), targets.end());

    std::vector<TargetTruth> scatterers(targets.begin(), targets.end());
    if (s.clutter && s.clutter->power > 0.0 && s.clutter->scatterers > 0) {
        auto rng = segment_rng(s.seed, 2, 0);
        const double var = s.clutter->power / s.propagation_loss / s.clutter->scatterers;
        std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
        for (int i = 0; i < s.clutter->scatterers; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            scatterers.push_back(make_point_truth(s.plan.r1, s.clutter->range, 0.0, cplx(re, im), s.plan.pri,
                                                  kSpeedOfLight));
        }
    }

    SampleStream rx;
    rx.fs = out.timing.fs;
    rx.data.assign(out.timing.length, cplx{});
    synthesize_target_echo(rx, out.timing, s.waveform, scatterers, s.threads);
    if (s.noise_density > 0.0) add_noise(rx, out.timing, s.noise_density, s.seed, s.threads);
    const SampleStream z = pulse_compress(rx, s.waveform, s.threads);
    out.data = build_data_matrix(z, s.plan, s.r2_min, s.waveform.bandwidth(), s.oversample, s.threads);
    return out;
}

}  // namespace risradar
