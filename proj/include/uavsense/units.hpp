#pragma once

#include <cmath>
#include <numbers>

namespace uavsense
{

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Speed of light in vacuum [m/s].
inline constexpr double speed_of_light = 299792458.0;

/// sigma[dBsm] = 10 log10(sigma / 1 m^2).
inline double dbsm_to_m2(double dbsm) { return std::pow(10.0, dbsm / 10.0); }
inline double m2_to_dbsm(double m2) { return 10.0 * std::log10(m2); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace uavsense
