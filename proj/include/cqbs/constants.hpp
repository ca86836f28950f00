#pragma once

namespace cqbs::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// SI values (2019 redefinition where exact)
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double flux_quantum = 2.067833848e-15;    // Wb, h/(2e)

inline constexpr const char* artifact_version = "0.1.0";

}  // namespace cqbs::constants
