#pragma once

#include <string>

// Unit conventions used throughout the library:
//  * all rates, Rabi frequencies and detunings are angular (rad/s),
//  * config files quote ordinary frequencies with an explicit unit suffix
//    ("480 MHz" means omega/2pi = 480 MHz and is stored as 2*pi*480e6 rad/s),
//  * lengths in metres, areas in m^2, temperatures in kelvin, masses in kg
//    (config suffix "amu" converts to kg).
namespace sixwave::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double c_light = 299792458.0;        // m/s
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double epsilon_0 = 8.8541878128e-12; // F/m
inline constexpr double atomic_mass = 1.66053906892e-27; // kg

/// Kind of physical quantity a config field expects.
enum class Dimension {
  angular_rate, // rad/s; accepts Hz/kHz/MHz/GHz (scaled by 2*pi) or "rad/s"
  length,       // m; accepts m/cm/mm/um/nm
  area,         // m^2; accepts m^2/cm^2/mm^2
  temperature,  // K
  mass,         // kg; accepts kg/amu
  wavenumber,   // rad/m; accepts "rad/m" or "1/m"
  dimensionless,
};

/// Parse "480 MHz", "-1.04 GHz", "0.025 m", "85 amu", ... into internal units.
/// Bare numbers are accepted for dimensionless quantities only.
/// Throws std::invalid_argument with a descriptive message on failure.
double parse_quantity(const std::string& text, Dimension dim);

/// rad/s -> ordinary frequency in MHz (used for output columns).
inline double to_mhz(double angular) { return angular / (two_pi * 1.0e6); }
inline double from_mhz(double mhz) { return mhz * two_pi * 1.0e6; }

} // namespace sixwave::units
