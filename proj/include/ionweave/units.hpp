#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace ionweave {

namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double hbar = 1.054571817e-34;                 // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg
inline constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace constants

inline constexpr double to_angular(double hz) { return constants::two_pi * hz; }
inline constexpr double to_ordinary(double rad_per_s) { return rad_per_s / constants::two_pi; }

enum class Dimension {
    frequency,  // Hz, kHz, MHz, GHz
    time,       // s, ms, us, ns
    length,     // m, mm, um, nm
    mass,       // kg, u, amu
    wavevector, // rad/m, 1/m, rad/um, 1/um, rad/nm
    gradient,   // Hz/m, Hz/um, kHz/um, kHz/mm, MHz/m
    angle,      // rad, deg
};

std::string_view dimension_name(Dimension d);

// Parses "<number> <unit>" (whitespace optional) into SI units. A bare number
// without a unit suffix is rejected, as is a unit of the wrong dimension.
double parse_quantity(std::string_view text, Dimension dim);

// Formats an SI value with the given unit suffix, e.g. format_quantity(1.2e5, "kHz")
// gives "120 kHz". Used for human-readable reports only.
std::string format_quantity(double si_value, std::string_view unit, int precision = 6);

} // namespace ionweave
