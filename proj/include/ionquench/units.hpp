#pragma once

// Unit system and conversions between physical trap parameters and the
// dimensionless control parameters.
//
// Internally every length is measured in the characteristic length
//   l = (q^2 / (4 pi eps0 m nu_x^2))^(1/3),
// every time in 1/nu_x and every energy in m nu_x^2 l^2. Planck's constant
// enters only through hbar_tilde = hbar / (m nu_x l^2).

namespace ionquench {

namespace constants {
// CODATA 2018, 10 significant digits.
inline constexpr double vacuum_permittivity = 8.854187813e-12;  // F/m
inline constexpr double hbar = 1.054571817e-34;                 // J s
inline constexpr double atomic_mass_unit = 1.660539067e-27;     // kg
inline constexpr double elementary_charge = 1.602176634e-19;    // C
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

/// Physical description of the trap, the ion species and the spin-dependent force.
/// Frequencies are angular (rad/s).
struct TrapSpec {
    int ion_count = 3;
    double ion_mass = 9.0122;  // u
    double ion_charge = 1.0;   // e
    double nu_x = 0.0;
    double nu_y = 0.0;
    double nu_dip = 0.0;
};

struct DimensionlessParams {
    double length_unit = 0.0;  // m
    double time_unit = 0.0;    // s
    double hbar_tilde = 0.0;
    double alpha = 0.0;      // nu_y^2 / nu_x^2
    double alpha_dip = 0.0;  // nu_dip^2 / nu_x^2
    double alpha_c = 0.0;    // nu_c^2 / nu_x^2
    double g = 0.0;          // (nu_y^2 - nu_c^2) / nu_c^2
    double delta = 0.0;      // nu_dip^2 / nu_c^2
};

/// Throws InvalidInput unless ion_count is odd and >= 3, nu_x, nu_y > 0,
/// nu_dip >= 0 and mass/charge are positive.
void validate(const TrapSpec& spec);

DimensionlessParams derive_dimensionless(const TrapSpec& spec, double alpha_c);

/// nu_dip = nu_c sqrt(delta).
double dip_from_delta(double delta, double nu_c);

/// nu_y = nu_c sqrt(1 + g).
double transverse_from_g(double g, double nu_c);

/// nu_c = nu_x sqrt(alpha_c).
double critical_frequency(double nu_x, double alpha_c);

double characteristic_length(double mass_u, double charge_e, double nu_x);
double reduced_hbar(double mass_u, double charge_e, double nu_x);

}  // namespace ionquench
