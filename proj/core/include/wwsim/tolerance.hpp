#pragma once

namespace wwsim::tolerance {

// Numerical acceptance thresholds shared by every module.
inline constexpr double norm = 1e-10;
inline constexpr double trace = 1e-10;
inline constexpr double hermiticity = 1e-10;
inline constexpr double eigenvalue_floor = -1e-10;

// Below this a state (or a branch weight) is treated as null.
inline constexpr double zero_norm = 1e-12;
inline constexpr double degenerate_probability = 1e-12;

// Discrete normalization of a sampled wavepacket.
inline constexpr double packet_norm = 1e-8;

}  // namespace wwsim::tolerance
