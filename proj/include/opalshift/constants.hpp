#ifndef OPALSHIFT_CONSTANTS_HPP
#define OPALSHIFT_CONSTANTS_HPP

namespace opalshift::constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double c_light = 2.99792458e8;        // m/s
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
inline constexpr double rydberg_energy = 2.1798723611035e-18;  // J

inline constexpr double pi = 3.14159265358979323846;

// relativistic photon-energy cutoff m c^2 / hbar
inline constexpr double omega_rel_default =
    electron_mass * c_light * c_light / hbar;  // rad/s

// reduced frequency u = omega a / (2 pi c)
inline constexpr double reduced_frequency(double omega_rad_s, double a_m) {
    return omega_rad_s * a_m / (2.0 * pi * c_light);
}

inline constexpr double angular_frequency(double u_reduced, double a_m) {
    return u_reduced * 2.0 * pi * c_light / a_m;
}

}  // namespace opalshift::constants

#endif
