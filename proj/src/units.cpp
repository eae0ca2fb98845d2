#include "ionquench/units.hpp"

#include <cmath>
#include <string>

#include "ionquench/errors.hpp"

namespace ionquench {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw InvalidInput(std::string(name) + " must be positive and finite");
}

}  // namespace

void validate(const TrapSpec& spec) {
    if (spec.ion_count < 3 || spec.ion_count % 2 == 0)
        throw InvalidInput("ion_count must be odd and >= 3, got " + std::to_string(spec.ion_count));
    require_positive(spec.ion_mass, "ion_mass");
    require_positive(spec.ion_charge, "ion_charge");
    require_positive(spec.nu_x, "nu_x");
    require_positive(spec.nu_y, "nu_y");
    if (!(spec.nu_dip >= 0.0) || !std::isfinite(spec.nu_dip))
        throw InvalidInput("nu_dip must be non-negative and finite");
}

double characteristic_length(double mass_u, double charge_e, double nu_x) {
    require_positive(mass_u, "ion_mass");
    require_positive(charge_e, "ion_charge");
    require_positive(nu_x, "nu_x");
    using namespace constants;
    const double q = charge_e * elementary_charge;
    const double m = mass_u * atomic_mass_unit;
    return std::cbrt(q * q / (4.0 * pi * vacuum_permittivity * m * nu_x * nu_x));
}

double reduced_hbar(double mass_u, double charge_e, double nu_x) {
    const double l = characteristic_length(mass_u, charge_e, nu_x);
    const double m = mass_u * constants::atomic_mass_unit;
    return constants::hbar / (m * nu_x * l * l);
}

DimensionlessParams derive_dimensionless(const TrapSpec& spec, double alpha_c) {
    validate(spec);
    require_positive(alpha_c, "alpha_c");

    DimensionlessParams p;
    p.length_unit = characteristic_length(spec.ion_mass, spec.ion_charge, spec.nu_x);
    p.time_unit = 1.0 / spec.nu_x;
    p.hbar_tilde = reduced_hbar(spec.ion_mass, spec.ion_charge, spec.nu_x);
    const double nx2 = spec.nu_x * spec.nu_x;
    p.alpha = spec.nu_y * spec.nu_y / nx2;
    p.alpha_dip = spec.nu_dip * spec.nu_dip / nx2;
    p.alpha_c = alpha_c;
    p.g = p.alpha / alpha_c - 1.0;
    p.delta = p.alpha_dip / alpha_c;
    return p;
}

double dip_from_delta(double delta, double nu_c) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw InvalidInput("delta must be non-negative, got " + std::to_string(delta));
    require_positive(nu_c, "nu_c");
    return nu_c * std::sqrt(delta);
}

double transverse_from_g(double g, double nu_c) {
    if (!(g > -1.0))
        throw InvalidInput("g must exceed -1, got " + std::to_string(g));
    require_positive(nu_c, "nu_c");
    return nu_c * std::sqrt(1.0 + g);
}

double critical_frequency(double nu_x, double alpha_c) {
    require_positive(nu_x, "nu_x");
    require_positive(alpha_c, "alpha_c");
    return nu_x * std::sqrt(alpha_c);
}

}  // namespace ionquench
