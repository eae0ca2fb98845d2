#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "ionquench/units.hpp"

namespace ionquench {

/// Internal state of the central ion: ground (g) or excited (e).
enum class InternalState { ground, excited };

enum class Structure { linear, zigzag };

std::string_view to_string(InternalState state);
std::string_view to_string(Structure structure);

/// Dimensionless potential-energy model of an N-ion planar crystal.
///
/// Coordinates are packed as (x_1 .. x_N, y_1 .. y_N). The excited state adds
/// the stiffening alpha_dip / 2 * y_c^2 on the central ion c = N / 2 (0-based),
/// which is only defined for odd N.
struct CrystalModel {
    int ion_count = 3;
    double alpha = 0.0;
    double alpha_dip = 0.0;
};

CrystalModel crystal_model(const DimensionlessParams& params, int ion_count);

/// Builds the model at a point (g, delta) of the phase diagram.
CrystalModel crystal_model_at(int ion_count, double g, double delta);

/// 0-based index of the central ion; throws InvalidInput for even N.
int central_ion(int ion_count);

struct EquilibriumConfiguration {
    InternalState state = InternalState::ground;
    Eigen::VectorXd positions;
    double energy = 0.0;
    Structure structure = Structure::linear;

    int ion_count() const { return static_cast<int>(positions.size() / 2); }
    auto x() const { return positions.head(ion_count()); }
    auto y() const { return positions.tail(ion_count()); }
};

double potential_energy(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                        InternalState state);

Eigen::VectorXd potential_gradient(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                                   InternalState state);

/// Analytic second derivatives of the potential (per unit mass).
Eigen::MatrixXd potential_hessian(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                                  InternalState state);

struct MinimizerOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-10;  // max-norm acceptance threshold
    double target_tolerance = 1e-13;    // stop early once below this
};

/// Finds a stable classical equilibrium.
///
/// Without a seed the search runs from the equally spaced linear ansatz and
/// from the same ansatz with an alternating transverse perturbation, and the
/// lower-energy stable result wins. Ions are returned sorted by x; zigzag
/// results are put on the canonical branch with the central ion at y > 0.
EquilibriumConfiguration find_equilibrium(const CrystalModel& model, InternalState state,
                                          const std::optional<Eigen::VectorXd>& seed = std::nullopt,
                                          const MinimizerOptions& options = {});

inline constexpr double linear_deadband = 1e-6;

Structure classify_structure(const EquilibriumConfiguration& config);
Structure classify_structure(const Eigen::Ref<const Eigen::VectorXd>& positions);

/// Axial equilibrium of the linear chain (independent of alpha).
Eigen::VectorXd linear_chain_positions(int ion_count);

/// Smallest eigenvalue of the transverse Hessian block of the linear chain.
double linear_transverse_min_eigenvalue(const CrystalModel& model, InternalState state);

/// Aspect ratio at which the linear chain loses transverse stability (bisection on [1, 10 N^2]).
double critical_aspect_ratio(int ion_count);

/// derive_dimensionless with alpha_c computed for spec.ion_count.
DimensionlessParams resolve_dimensionless(const TrapSpec& spec);

/// Value of g at which the excited-state linear chain becomes unstable for a
/// given delta (bisection on [-0.5, 0]).
double phase_boundary(int ion_count, double delta);

struct PhasePoint {
    double g = 0.0;
    double delta = 0.0;
    Structure structure_g = Structure::linear;
    Structure structure_e = Structure::linear;
};

PhasePoint phase_point(int ion_count, double g, double delta);

}  // namespace ionquench
