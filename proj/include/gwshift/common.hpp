#pragma once

#include <complex>
#include <numbers>

namespace gwshift {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// SI constants (CODATA 2018)
inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kMu0 = 1.25663706212e-6;              // H/m
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);
inline constexpr double kHbarCOverE = 1.9732698044e-7;        // eV*m, converts 1/m -> eV

/// Photon energy in eV for a (possibly complex) vacuum wavenumber k [1/m].
inline Complex photon_energy_ev(Complex k) { return kHbarCOverE * k; }

/// Vacuum wavelength in meters for a real vacuum wavenumber k [1/m].
inline double vacuum_wavelength(double k) { return 2.0 * kPi / k; }

}  // namespace gwshift
