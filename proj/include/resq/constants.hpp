#pragma once

namespace resq::constants {

// 2019 SI defining constants (exact) plus CODATA-2018 mu0. Everything in
// this library works in strict SI; unit conversion happens only at the
// parsing boundary (see units.hpp).
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double boltzmann = 1.380649e-23;            // J / K
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double mu0 = 1.25663706212e-6;              // H / m

// Joules per electron-volt.
inline constexpr double joule_per_ev = elementary_charge;

// Weak-coupling ratio gap0 / (kB * Tc) used to derive a transition
// temperature when only the zero-temperature gap is known.
inline constexpr double bcs_gap_ratio = 1.764;

inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace resq::constants
