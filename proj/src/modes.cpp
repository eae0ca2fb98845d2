#include "ionquench/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ionquench/errors.hpp"

namespace ionquench {

Eigen::MatrixXd hessian(const EquilibriumConfiguration& config, const CrystalModel& model) {
    return potential_hessian(config.positions, model, config.state);
}

namespace {

void fix_column_sign(Eigen::Ref<Eigen::VectorXd> column) {
    const double largest = column.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        if (std::abs(column[i]) >= largest - 1e-8) {
            if (column[i] < 0.0)
                column *= -1.0;
            return;
        }
    }
}

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-12)
            return a[i] < b[i];
    }
    return false;
}

}  // namespace

NormalModeBasis normal_modes(const Eigen::Ref<const Eigen::MatrixXd>& hess, InternalState state) {
    if (hess.rows() != hess.cols() || hess.rows() == 0)
        throw InvalidInput("Hessian must be square and non-empty");
    if (!hess.isApprox(hess.transpose(), 1e-12))
        throw InvalidInput("Hessian must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the Hessian failed");

    const Eigen::VectorXd& values = solver.eigenvalues();
    if (values[0] < min_stable_eigenvalue)
        throw UnstableStructure("Hessian eigenvalue below stability threshold", values[0]);

    Eigen::MatrixXd vectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < vectors.cols(); ++k)
        fix_column_sign(vectors.col(k));

    // Order inside degenerate groups lexicographically.
    const Eigen::Index dim = values.size();
    std::vector<Eigen::Index> order(dim);
    std::iota(order.begin(), order.end(), 0);
    for (Eigen::Index start = 0; start < dim;) {
        Eigen::Index end = start + 1;
        while (end < dim && values[end] - values[start] <= 1e-10 * std::max(1.0, std::abs(values[start])))
            ++end;
        if (end - start > 1) {
            std::stable_sort(order.begin() + start, order.begin() + end, [&](Eigen::Index a, Eigen::Index b) {
                return lexicographic_less(vectors.col(a), vectors.col(b));
            });
        }
        start = end;
    }

    NormalModeBasis basis;
    basis.state = state;
    basis.mode_matrix.resize(dim, dim);
    basis.frequencies.resize(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        basis.mode_matrix.col(k) = vectors.col(order[k]);
        basis.frequencies[k] = std::sqrt(values[order[k]]);
    }
    return basis;
}

NormalModeBasis normal_modes(const EquilibriumConfiguration& config, const CrystalModel& model) {
    NormalModeBasis basis = normal_modes(hessian(config, model), config.state);
    basis.equilibrium = config;
    return basis;
}

}  // namespace ionquench
