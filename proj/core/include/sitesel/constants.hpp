#pragma once

#include <numbers>

namespace sitesel {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double rb87_mass = 1.443160648e-25;   // kg

// Frequencies are stored as angular frequencies (rad/s) everywhere inside
// the library. Conversion to Hz happens only at I/O boundaries.
constexpr double angular_from_hz(double hz) { return two_pi * hz; }
constexpr double hz_from_angular(double w) { return w / two_pi; }

}  // namespace sitesel
