#pragma once

namespace macrospin {

/// Physical constants (SI, CODATA 2018). Fixed values; a custom set can be
/// passed where a constants argument is accepted, but members never change
/// after construction.
struct PhysicalConstants {
    /// reduced Planck constant [J s]
    double hbar = 1.054'571'817e-34;
    /// vacuum permeability [H/m]
    double mu0 = 1.256'637'062'12e-6;
    /// elementary charge [C]
    double e = 1.602'176'634e-19;
    /// Boltzmann constant [J/K]
    double k_b = 1.380'649e-23;
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace macrospin
