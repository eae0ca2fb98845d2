#include "ionquench/quench.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ionquench/errors.hpp"

namespace ionquench {

double BogoliubovResiduals::max() const {
    return std::max({uu_minus_vv, uv_minus_vu, t_orthogonality, a_symmetry, z_determinant});
}

TakagiFactors takagi_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& A) {
    if (A.rows() != A.cols())
        throw InvalidInput("takagi_symmetric: matrix must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()))
        throw InvalidInput("takagi_symmetric: matrix must be symmetric");

    // For a real symmetric matrix the Takagi factorization is the orthogonal
    // eigendecomposition with signed eigenvalues.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (A + A.transpose()));
    if (solver.info() != Eigen::Success)
        throw NumericError("takagi_symmetric: eigendecomposition failed");

    TakagiFactors factors{solver.eigenvectors(), solver.eigenvalues()};
    if (factors.a.size() > 0 && factors.a.cwiseAbs().maxCoeff() >= 1.0)
        throw NonPhysicalMap("squeezing kernel has spectral norm >= 1");
    return factors;
}

Eigen::MatrixXd squeezing_parameters(const Eigen::Ref<const Eigen::MatrixXd>& Lambda,
                                     const Eigen::Ref<const Eigen::VectorXd>& a) {
    if (a.size() > 0 && a.cwiseAbs().maxCoeff() >= 1.0)
        throw DomainError("atanh undefined for |a| >= 1");
    const Eigen::VectorXd chi = a.unaryExpr([](double x) { return std::atanh(x); });
    Eigen::MatrixXd xi = Lambda * chi.asDiagonal() * Lambda.transpose();
    return 0.5 * (xi + xi.transpose());
}

double ground_state_overlap(const QuenchMap& map) {
    const Eigen::VectorXd& b = map.beta_e;
    return map.Z * std::exp(0.5 * b.dot(map.A * b) - 0.5 * b.squaredNorm());
}

QuenchMap quench_map_from_modes(const Eigen::Ref<const Eigen::VectorXd>& omega_g,
                                const Eigen::Ref<const Eigen::VectorXd>& omega_e,
                                const Eigen::Ref<const Eigen::MatrixXd>& T, const Eigen::Ref<const Eigen::VectorXd>& D,
                                double hbar_tilde) {
    const Eigen::Index n = omega_g.size();
    if (omega_e.size() != n || T.rows() != n || T.cols() != n || D.size() != n)
        throw InvalidInput("quench map: inconsistent dimensions");
    if (!(hbar_tilde > 0.0))
        throw InvalidInput("quench map: hbar_tilde must be positive");
    if ((omega_g.array() <= 0.0).any() || (omega_e.array() <= 0.0).any())
        throw UnstableStructure("quench map: non-positive mode frequency",
                                std::min(omega_g.minCoeff(), omega_e.minCoeff()));

    QuenchMap map;
    map.T = T;
    map.D = D;
    map.omega_g = omega_g;
    map.omega_e = omega_e;
    map.hbar_tilde = hbar_tilde;

    map.u.resize(n, n);
    map.v.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double ratio = std::sqrt(omega_e[k] / omega_g[j]);
            map.u(j, k) = 0.5 * T(j, k) * (ratio + 1.0 / ratio);
            map.v(j, k) = 0.5 * T(j, k) * (ratio - 1.0 / ratio);
        }
    }
    map.beta_g = (omega_g.array() / (2.0 * hbar_tilde)).sqrt() * D.array();

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.u);
    const auto& sigma = svd.singularValues();
    map.u_condition = sigma[n - 1] > 0.0 ? sigma[0] / sigma[n - 1] : INFINITY;
    if (!(map.u_condition <= max_u_condition))
        throw IllConditionedMap("Bogoliubov coefficient u is ill-conditioned", map.u_condition);

    const Eigen::MatrixXd raw_A = Eigen::PartialPivLU<Eigen::MatrixXd>(map.u).solve(map.v);
    map.A_asymmetry = (raw_A - raw_A.transpose()).cwiseAbs().maxCoeff();
    map.A = 0.5 * (raw_A + raw_A.transpose());
    map.beta_e = -(map.u + map.v).transpose() * map.beta_g;

    const TakagiFactors takagi = takagi_symmetric(map.A);
    map.takagi_vectors = takagi.Lambda;
    map.takagi_values = takagi.a;
    map.Z = (1.0 - takagi.a.array().square()).pow(0.25).prod();
    map.xi = squeezing_parameters(takagi.Lambda, takagi.a);
    map.G0 = ground_state_overlap(map);
    return map;
}

QuenchMap build_quench_map(const NormalModeBasis& basis_g, const NormalModeBasis& basis_e, double hbar_tilde) {
    if (basis_g.size() != basis_e.size())
        throw InvalidInput("quench map: bases have different sizes");
    if (basis_g.equilibrium.positions.size() != basis_g.size() ||
        basis_e.equilibrium.positions.size() != basis_e.size())
        throw InvalidInput("quench map: bases must carry their equilibria");

    const Eigen::VectorXd d = basis_e.equilibrium.positions - basis_g.equilibrium.positions;
    const Eigen::MatrixXd T = basis_g.mode_matrix.transpose() * basis_e.mode_matrix;
    const Eigen::VectorXd D = basis_g.mode_matrix.transpose() * d;
    return quench_map_from_modes(basis_g.frequencies, basis_e.frequencies, T, D, hbar_tilde);
}

BogoliubovResiduals bogoliubov_residuals(const QuenchMap& map) {
    const Eigen::Index n = map.size();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    BogoliubovResiduals r;
    r.uu_minus_vv = (map.u * map.u.transpose() - map.v * map.v.transpose() - I).cwiseAbs().maxCoeff();
    r.uv_minus_vu = (map.u * map.v.transpose() - map.v * map.u.transpose()).cwiseAbs().maxCoeff();
    r.t_orthogonality = (map.T.transpose() * map.T - I).cwiseAbs().maxCoeff();
    r.a_symmetry = map.A_asymmetry;

    // det(1 - A^2)^{1/4} through the determinant itself, independent of the eigenvalues.
    const double det = (I - map.A * map.A).determinant();
    r.z_determinant = std::abs(map.Z - std::pow(det, 0.25)) / map.Z;
    return r;
}

}  // namespace ionquench
