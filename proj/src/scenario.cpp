#include "ionquench/scenario.hpp"

namespace ionquench {

QuenchScenario build_scenario(const CrystalModel& model, double hbar_tilde) {
    QuenchScenario s;
    s.model = model;
    s.hbar_tilde = hbar_tilde;
    s.equilibrium_g = find_equilibrium(model, InternalState::ground);
    s.equilibrium_e = find_equilibrium(model, InternalState::excited);
    s.basis_g = normal_modes(s.equilibrium_g, model);
    s.basis_e = normal_modes(s.equilibrium_e, model);
    s.map = build_quench_map(s.basis_g, s.basis_e, hbar_tilde);
    return s;
}

QuenchScenario build_scenario(const TrapSpec& spec) {
    const DimensionlessParams p = resolve_dimensionless(spec);
    return build_scenario(crystal_model(p, spec.ion_count), p.hbar_tilde);
}

QuenchScenario build_scenario_at(int ion_count, double g, double delta, double hbar_tilde) {
    return build_scenario(crystal_model_at(ion_count, g, delta), hbar_tilde);
}

}  // namespace ionquench
