#pragma once

#include <Eigen/Core>

#include "ionquench/modes.hpp"

namespace ionquench {

/// Bogoliubov map between the ground-state (g) and excited-state (e) phonon bases.
///
/// b^g_j = sum_k u_jk b^e_k - v_jk b^e_k^dagger + beta_g_j, and the g vacuum is
/// |0>_g = Z D(beta_e) exp(1/2 sum A_jk b^e_j^dagger b^e_k^dagger) |0>_e.
struct QuenchMap {
    Eigen::MatrixXd T;       // T_jl = sum_k M^g_kj M^e_kl
    Eigen::VectorXd D;       // mode displacements in the g basis
    Eigen::VectorXd beta_g;  // sqrt(omega_g / (2 hbar_tilde)) * D
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
    Eigen::MatrixXd A;  // u^{-1} v, symmetrized
    Eigen::VectorXd beta_e;
    double Z = 1.0;
    Eigen::MatrixXd xi;
    double G0 = 1.0;
    Eigen::VectorXd omega_g;
    Eigen::VectorXd omega_e;
    double hbar_tilde = 1.0;

    Eigen::MatrixXd takagi_vectors;  // Lambda
    Eigen::VectorXd takagi_values;   // a
    double A_asymmetry = 0.0;        // max |A - A^T| before symmetrization
    double u_condition = 1.0;

    Eigen::Index size() const { return omega_e.size(); }
};

/// Maximum residuals of the identities a valid map satisfies.
struct BogoliubovResiduals {
    double uu_minus_vv = 0.0;      // u u^T - v v^T - 1
    double uv_minus_vu = 0.0;      // u v^T - v u^T
    double t_orthogonality = 0.0;  // T^T T - 1
    double a_symmetry = 0.0;
    double z_determinant = 0.0;  // relative |Z - det(1 - A^2)^{1/4}|

    double max() const;
};

inline constexpr double max_u_condition = 1e12;

QuenchMap build_quench_map(const NormalModeBasis& basis_g, const NormalModeBasis& basis_e, double hbar_tilde);

/// Builds the map directly from mode frequencies, the overlap matrix T and the
/// g-basis displacements D, without any crystal behind it.
QuenchMap quench_map_from_modes(const Eigen::Ref<const Eigen::VectorXd>& omega_g,
                                const Eigen::Ref<const Eigen::VectorXd>& omega_e,
                                const Eigen::Ref<const Eigen::MatrixXd>& T, const Eigen::Ref<const Eigen::VectorXd>& D,
                                double hbar_tilde);

struct TakagiFactors {
    Eigen::MatrixXd Lambda;
    Eigen::VectorXd a;
};

/// A = Lambda diag(a) Lambda^T for real symmetric A; throws NonPhysicalMap if any |a| >= 1.
TakagiFactors takagi_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& A);

/// xi = Lambda diag(atanh a) Lambda^T.
Eigen::MatrixXd squeezing_parameters(const Eigen::Ref<const Eigen::MatrixXd>& Lambda,
                                     const Eigen::Ref<const Eigen::VectorXd>& a);

/// G0 = Z exp(1/2 beta_e^T A beta_e - 1/2 |beta_e|^2).
double ground_state_overlap(const QuenchMap& map);

BogoliubovResiduals bogoliubov_residuals(const QuenchMap& map);

}  // namespace ionquench
