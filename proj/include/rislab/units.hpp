#pragma once

#include <cmath>
#include <numbers>

namespace rislab {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Converts a power level in dBm to watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

/// Reduces an angle to [0, 2pi).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

}  // namespace rislab
