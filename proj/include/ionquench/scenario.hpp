#pragma once

#include "ionquench/quench.hpp"

namespace ionquench {

/// Everything computed for one (N, alpha, alpha_dip, hbar_tilde) point: both
/// equilibria on the canonical branch, both mode bases and the quench map.
struct QuenchScenario {
    CrystalModel model;
    double hbar_tilde = 0.0;
    EquilibriumConfiguration equilibrium_g;
    EquilibriumConfiguration equilibrium_e;
    NormalModeBasis basis_g;
    NormalModeBasis basis_e;
    QuenchMap map;

    /// Lowest excited-state mode frequency (units of nu_x).
    double lowest_excited_frequency() const { return basis_e.frequencies[0]; }
};

QuenchScenario build_scenario(const CrystalModel& model, double hbar_tilde);

/// Scenario for a physical trap, with hbar_tilde taken from the species.
QuenchScenario build_scenario(const TrapSpec& spec);

/// Scenario at a phase-diagram point (g, delta).
QuenchScenario build_scenario_at(int ion_count, double g, double delta, double hbar_tilde);

}  // namespace ionquench
