#pragma once

// RIS-induced two-way pattern |1^T Sigma 1|^4, its factorised Dirichlet form,
// beamwidths, the patch pattern and the beam tiling of a coverage sector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "risradar/constants.hpp"
#include "risradar/geometry.hpp"

namespace risradar {

/// Directional-cosine offsets of the factorised pattern, in units of the
/// pitch-to-wavelength ratio.
struct PatternOffsets {
    double delta_ku = 0.0;
    double delta_kv = 0.0;
};

/// |1_N^T Sigma 1_M|^4 by full complex summation.
inline double induced_pattern_direct(const ComplexMatrix& sigma) {
    return std::pow(std::abs(sigma.sum()), 4);
}

inline double induced_pattern_direct(const ComplexMatrix& s1, const ReflectionProgram& gamma,
                                     const ComplexMatrix& s2) {
    return induced_pattern_direct(sigma_matrix(s1, gamma, s2));
}

/// sin(pi n dk) / sin(pi dk); the removable singularity at integer dk
/// evaluates to n (n odd).
inline double dirichlet_ratio(double dk, int n) {
    const double den = std::sin(kPi * dk);
    if (std::abs(den) < 1e-9) return static_cast<double>(n);
    return std::sin(kPi * n * dk) / den;
}

inline double induced_pattern_closed_form(const PatternOffsets& off, int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("pattern size must be >= 1");
    // One rounding at the peak: (NM)^2 is exact, so the result is (NM)^4 correctly rounded.
    const double f = dirichlet_ratio(off.delta_ku, n) * dirichlet_ratio(off.delta_kv, m);
    const double f2 = f * f;
    return f2 * f2;
}

/// Offsets for radar direction, target direction (both in the RIS frame) and
/// the two pointings used to build a phase-matched program.
inline PatternOffsets offsets_from_angles(const Direction& radar_dir, const Direction& target_dir,
                                          const Direction& pointing1, const Direction& pointing2,
                                          const RisPanel& panel, double lambda0) {
    const auto r = directional_cosines(radar_dir);
    const auto t = directional_cosines(target_dir);
    const auto p1 = directional_cosines(pointing1);
    const auto p2 = directional_cosines(pointing2);
    return {panel.dx() / lambda0 * ((t.u - p2.u) + (r.u - p1.u)),
            panel.dy() / lambda0 * ((t.v - p2.v) + (r.v - p1.v))};
}

/// Pattern relative to its (NM)^4 peak, in dB (10 log10 of the fourth-power quantity).
inline double normalized_pattern_db(double pattern, int n, int m) {
    const double peak = std::pow(static_cast<double>(n) * m, 4);
    return linear_to_db(pattern / peak);
}

/// Loss (dB, positive) of one Dirichlet factor relative to its peak.
inline double factor_loss_db(double dk, int n) {
    const double r = std::abs(dirichlet_ratio(dk, n)) / n;
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    return -40.0 * std::log10(r);
}

namespace detail {

/// Offset dk in (0, 1/n) at which one factor has lost `loss_db`.
inline double factor_halfwidth(double loss_db, int n) {
    if (!(loss_db > 0.0)) return 0.0;
    if (n == 1) return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 1.0 / n;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (factor_loss_db(mid, n) < loss_db ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double angle_between(const DirectionalCosines& a, const DirectionalCosines& b) {
    const Vec3 va(a.u, a.v, std::sqrt(std::max(0.0, 1.0 - a.u * a.u - a.v * a.v)));
    const Vec3 vb(b.u, b.v, std::sqrt(std::max(0.0, 1.0 - b.u * b.u - b.v * b.v)));
    return std::atan2(va.cross(vb).norm(), va.dot(vb));
}

inline bool visible(double u, double v) { return u * u + v * v <= 1.0; }

inline Direction direction_from_cosines(double u, double v) {
    const double rho = std::hypot(u, v);
    if (rho > 1.0 + 1e-12) throw std::domain_error("directional cosines outside the visible region");
    const double theta = std::asin(std::min(1.0, rho));
    const double phi = rho == 0.0 ? 0.0 : wrap_azimuth(std::atan2(v, u));
    return {theta, phi};
}

}  // namespace detail

/// Pattern drop that defines the RIS beamwidth: the one-way half-power point,
/// i.e. 12 dB on a 20 log10 scale of |1^T Sigma 1|^4 (6 dB in power terms).
inline constexpr double kBeamwidthDropDb = 6.0;

/// Single-side beamwidths; phi_bar along the panel x-axis (N patches),
/// theta_bar along the y-axis (M patches). Radians.
struct Beamwidths {
    double phi_bar = 0.0;
    double theta_bar = 0.0;
};

/// 0.891/N and 0.891/M: broadside, half-wavelength pitch.
inline Beamwidths beamwidths_analytic(const RisPanel& panel) {
    return {0.891 / panel.n(), 0.891 / panel.m()};
}

/// Numeric single-side widths along the two principal cuts through
/// `pointing`, with sub-region-1 phases matched. Widths are angles between the
/// pointing and the cut points where the pattern has dropped by `drop_db`,
/// averaged over the two sides; infinite if the drop is never reached inside
/// the visible region.
inline Beamwidths beamwidths(const RisPanel& panel, double lambda0, const Direction& pointing = {},
                             double drop_db = kBeamwidthDropDb) {
    const auto c = directional_cosines(pointing);
    const auto side_width = [&](double delta_cos, bool along_u) {
        double sum = 0.0;
        int count = 0;
        for (double s : {-1.0, 1.0}) {
            DirectionalCosines q = c;
            (along_u ? q.u : q.v) += s * delta_cos;
            if (detail::visible(q.u, q.v)) {
                sum += detail::angle_between(c, q);
                ++count;
            }
        }
        return count ? sum / count : std::numeric_limits<double>::infinity();
    };
    const double du = detail::factor_halfwidth(drop_db, panel.n()) * lambda0 / panel.dx();
    const double dv = detail::factor_halfwidth(drop_db, panel.m()) * lambda0 / panel.dy();
    return {side_width(du, true), side_width(dv, false)};
}

/// cos^exponent(theta) on [0, pi/2], zero elsewhere.
inline double patch_pattern(double theta, double exponent = 1.5) {
    if (!(exponent > 0.0)) throw std::invalid_argument("patch pattern exponent must be positive");
    if (theta < 0.0 || theta > kPi / 2.0) return 0.0;
    return std::pow(std::cos(theta), exponent);
}

/// 10 log10(1 / F^2(theta)); +inf at and beyond pi/2.
inline double scanning_loss_db(double theta, double exponent = 1.5) {
    if (!(theta >= 0.0)) throw std::domain_error("scanning angle must be nonnegative");
    if (theta >= kPi / 2.0) return std::numeric_limits<double>::infinity();
    return 2.0 * exponent * 10.0 * std::log10(1.0 / std::cos(theta));
}

/// Rectangle in (theta2, phi2) of RIS pointings, radians.
struct AngularSector {
    double theta_min = 0.0;
    double theta_max = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
};

struct Beam {
    Direction pointing;
    Beamwidths widths;           // predicted single-side widths at this pointing
    double worst_edge_loss_db;   // worst audited loss among sector points served by this beam
};

struct BeamGrid {
    std::vector<Beam> beams;
    double max_edge_loss_db = 0.0;
    double spacing_u = 0.0;  // grid spacing in directional cosines
    double spacing_v = 0.0;
    std::size_t size() const { return beams.size(); }
};

/// Two-way pattern loss (dB) of a target direction relative to a beam centre,
/// with sub-region-1 phases matched.
inline double pointing_loss_db(const DirectionalCosines& target, const DirectionalCosines& beam,
                               const RisPanel& panel, double lambda0) {
    return factor_loss_db(panel.dx() / lambda0 * (target.u - beam.u), panel.n()) +
           factor_loss_db(panel.dy() / lambda0 * (target.v - beam.v), panel.m());
}

/// Tiles `sector` with a uniform grid of beams in directional-cosine space so
/// that every sector direction is within `max_edge_loss_db` of its best beam.
///
/// The u/v spacings put the worst case (a cell corner) exactly at the loss
/// budget, split evenly between the two axes. Cells of the bounding-box grid
/// that contain no sector direction are dropped; a cell is kept when some
/// sample of the sector lies within the sampling radius of it, which makes the
/// pruning conservative for every point of the sector, not just the samples.
inline BeamGrid tile_sector(const AngularSector& sector, const RisPanel& panel, double lambda0,
                            double max_edge_loss_db) {
    if (!(max_edge_loss_db > 0.0)) throw std::invalid_argument("edge loss budget must be positive");
    if (!(sector.theta_max >= sector.theta_min) || !(sector.phi_max >= sector.phi_min)) {
        throw std::invalid_argument("empty angular sector");
    }
    check_direction(sector.theta_min, sector.phi_min);
    check_direction(sector.theta_max, sector.phi_max);

    const double span_t = sector.theta_max - sector.theta_min;
    const double span_p = sector.phi_max - sector.phi_min;

    // Bounding box of the sector in (u, v), from a coarse pass.
    double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
    {
        const int nb = 720;
        const int it = span_t > 0 ? nb : 0, ip = span_p > 0 ? nb : 0;
        for (int a = 0; a <= it; ++a) {
            for (int b = 0; b <= ip; ++b) {
                const double th = sector.theta_min + (it ? span_t * a / it : 0.0);
                const double ph = sector.phi_min + (ip ? span_p * b / ip : 0.0);
                const auto c = directional_cosines(th, ph);
                umin = std::min(umin, c.u), umax = std::max(umax, c.u);
                vmin = std::min(vmin, c.v), vmax = std::max(vmax, c.v);
            }
        }
    }
    const bool flat_u = umax - umin < 1e-12, flat_v = vmax - vmin < 1e-12;
    // The coarse pass can miss an interior extremum by O(step^2); pad for it.
    if (!flat_u) umin -= 1e-4, umax += 1e-4;
    if (!flat_v) vmin -= 1e-4, vmax += 1e-4;
    const double ext_u = umax - umin, ext_v = vmax - vmin;
    double budget_u = max_edge_loss_db / 2.0, budget_v = max_edge_loss_db / 2.0;
    if (flat_u && !flat_v) budget_u = 0.0, budget_v = max_edge_loss_db;
    if (flat_v && !flat_u) budget_v = 0.0, budget_u = max_edge_loss_db;

    double half_u = detail::factor_halfwidth(budget_u, panel.n()) * lambda0 / panel.dx();
    double half_v = detail::factor_halfwidth(budget_v, panel.m()) * lambda0 / panel.dy();

    for (int refine = 0; refine < 8; ++refine) {
        const int nu = flat_u ? 1 : std::max(1, static_cast<int>(std::ceil(ext_u / (2.0 * half_u) - 1e-12)));
        const int nv = flat_v ? 1 : std::max(1, static_cast<int>(std::ceil(ext_v / (2.0 * half_v) - 1e-12)));
        const double su = flat_u ? 0.0 : ext_u / nu;
        const double sv = flat_v ? 0.0 : ext_v / nv;
        const auto center_u = [&](int k) { return flat_u ? 0.5 * (umin + umax) : umin + (k + 0.5) * su; };
        const auto center_v = [&](int l) { return flat_v ? 0.5 * (vmin + vmax) : vmin + (l + 0.5) * sv; };

        // Sector samples; the (theta, phi) -> (u, v) map is 1-Lipschitz per
        // coordinate, so every sector point is within h of a sample.
        const double cell = std::max(1e-6, std::min(flat_u ? 1.0 : su, flat_v ? 1.0 : sv));
        const int st = span_t > 0 ? std::clamp(static_cast<int>(std::ceil(span_t / (cell / 4))), 1, 600) : 0;
        const int sp = span_p > 0 ? std::clamp(static_cast<int>(std::ceil(span_p / (cell / 4))), 1, 600) : 0;
        const double h = 0.5 * ((st ? span_t / st : 0.0) + (sp ? span_p / sp : 0.0));

        std::vector<DirectionalCosines> samples;
        samples.reserve(static_cast<std::size_t>(st + 1) * (sp + 1));
        for (int a = 0; a <= st; ++a) {
            for (int b = 0; b <= sp; ++b) {
                samples.push_back(directional_cosines(sector.theta_min + (st ? span_t * a / st : 0.0),
                                                      sector.phi_min + (sp ? span_p * b / sp : 0.0)));
            }
        }

        const auto cell_index = [](double x, double lo, double s, int n) {
            if (s == 0.0) return 0;
            return std::clamp(static_cast<int>(std::floor((x - lo) / s)), 0, n - 1);
        };

        // Keep every cell whose h-expanded rectangle contains a sample.
        std::map<std::pair<int, int>, int> kept;
        const int reach_u = su > 0 ? static_cast<int>(std::ceil(h / su)) + 1 : 0;
        const int reach_v = sv > 0 ? static_cast<int>(std::ceil(h / sv)) + 1 : 0;
        for (const auto& s : samples) {
            const int k0 = cell_index(s.u, umin, su, nu), l0 = cell_index(s.v, vmin, sv, nv);
            for (int k = std::max(0, k0 - reach_u); k <= std::min(nu - 1, k0 + reach_u); ++k) {
                for (int l = std::max(0, l0 - reach_v); l <= std::min(nv - 1, l0 + reach_v); ++l) {
                    const double cu = center_u(k), cv = center_v(l);
                    if (std::abs(s.u - cu) <= su / 2 + h && std::abs(s.v - cv) <= sv / 2 + h) {
                        kept.emplace(std::make_pair(k, l), -1);
                    }
                }
            }
        }

        bool all_visible = true;
        for (const auto& [kl, idx] : kept) {
            if (!detail::visible(center_u(kl.first), center_v(kl.second))) all_visible = false;
        }
        if (!all_visible) {
            half_u /= 2.0, half_v /= 2.0;
            continue;
        }

        BeamGrid grid;
        grid.spacing_u = su;
        grid.spacing_v = sv;
        for (auto& [kl, idx] : kept) {
            const DirectionalCosines c{center_u(kl.first), center_v(kl.second)};
            const Direction p = detail::direction_from_cosines(c.u, c.v);
            idx = static_cast<int>(grid.beams.size());
            grid.beams.push_back({p, beamwidths(panel, lambda0, p), 0.0});
        }

        // Audit: worst loss of each sample against its best beam.
        for (const auto& s : samples) {
            const int k0 = cell_index(s.u, umin, su, nu), l0 = cell_index(s.v, vmin, sv, nv);
            double best = std::numeric_limits<double>::infinity();
            int best_idx = -1;
            for (int k = std::max(0, k0 - 1); k <= std::min(nu - 1, k0 + 1); ++k) {
                for (int l = std::max(0, l0 - 1); l <= std::min(nv - 1, l0 + 1); ++l) {
                    const auto it = kept.find({k, l});
                    if (it == kept.end()) continue;
                    const double loss =
                        pointing_loss_db(s, {center_u(k), center_v(l)}, panel, lambda0);
                    if (loss < best) best = loss, best_idx = it->second;
                }
            }
            if (best_idx >= 0) {
                auto& beam = grid.beams[static_cast<std::size_t>(best_idx)];
                beam.worst_edge_loss_db = std::max(beam.worst_edge_loss_db, best);
                grid.max_edge_loss_db = std::max(grid.max_edge_loss_db, best);
            }
        }
        return grid;
    }
    throw std::domain_error("sector cannot be tiled: beam centres fall beyond endfire");
}

}  // namespace risradar
