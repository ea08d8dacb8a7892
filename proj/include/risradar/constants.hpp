#pragma once

#include <cmath>
#include <numbers>

namespace risradar {

inline constexpr double kSpeedOfLight = 299'792'458.0;   // m/s, exact
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K, exact (SI 2019)
inline constexpr double kStandardTemperature = 290.0;    // K
inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline double wavelength_from_frequency(double f0) { return kSpeedOfLight / f0; }

}  // namespace risradar
