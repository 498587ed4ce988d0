#pragma once

#include <numbers>

namespace alox::constants {

// CODATA 2018 exact SI values.
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double reduced_planck = planck / (2.0 * std::numbers::pi);
inline constexpr double boltzmann = 1.380649e-23;            // J / K

inline constexpr double angstrom = 1e-10; // m

} // namespace alox::constants
