#pragma once

#include <Eigen/Core>

#include "ionquench/crystal.hpp"

namespace ionquench {

/// Orthogonal normal-mode decomposition of one crystal structure.
///
/// Columns of mode_matrix are the modes, frequencies are in units of nu_x and
/// sorted ascending. Each column is signed so that its largest-magnitude entry
/// is positive (lowest index on ties).
struct NormalModeBasis {
    InternalState state = InternalState::ground;
    Eigen::MatrixXd mode_matrix;
    Eigen::VectorXd frequencies;
    EquilibriumConfiguration equilibrium;

    Eigen::Index size() const { return frequencies.size(); }
};

/// Mass-scaled Hessian of the state-dependent potential at an equilibrium.
Eigen::MatrixXd hessian(const EquilibriumConfiguration& config, const CrystalModel& model);

/// Orthogonal eigendecomposition of a symmetric Hessian. Throws
/// UnstableStructure when an eigenvalue falls below the stability threshold.
NormalModeBasis normal_modes(const Eigen::Ref<const Eigen::MatrixXd>& hess, InternalState state);

/// Convenience: Hessian + decomposition, keeping the equilibrium.
NormalModeBasis normal_modes(const EquilibriumConfiguration& config, const CrystalModel& model);

inline constexpr double min_stable_eigenvalue = 1e-9;

}  // namespace ionquench
