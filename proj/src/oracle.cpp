#include "ionquench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "ionquench/errors.hpp"

namespace ionquench {

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

namespace {

void validate(const FockInstance& inst) {
    if (inst.n_modes != 1 && inst.n_modes != 2)
        throw InvalidInput("Fock oracle supports one or two modes");
    const Eigen::Index n = inst.n_modes;
    if (inst.omega_g.size() != n || inst.omega_e.size() != n || inst.T_rot.rows() != n || inst.T_rot.cols() != n ||
        inst.displacement.size() != n)
        throw InvalidInput("Fock instance has inconsistent dimensions");
    if ((inst.omega_g.array() <= 0.0).any() || (inst.omega_e.array() <= 0.0).any())
        throw InvalidInput("Fock instance frequencies must be positive");
    if ((inst.T_rot.transpose() * inst.T_rot - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidInput("Fock instance T_rot must be orthogonal");
    if (inst.cutoff < min_fock_cutoff || inst.cutoff > max_fock_cutoff)
        throw InvalidInput("Fock cutoff must lie in [20, 120]");
    if (!(inst.hbar_tilde > 0.0))
        throw InvalidInput("hbar_tilde must be positive");
}

using Triplets = std::vector<Eigen::Triplet<double>>;

// Single-mode operators as (row, col, value) lists on n = 0 .. c-1, with exact
// matrix elements of the untruncated operators.
struct SingleMode {
    Triplets x;   // b + b^dagger
    Triplets x2;  // (b + b^dagger)^2
    Triplets p2;  // -(b^dagger - b)^2
};

SingleMode single_mode_operators(int c) {
    SingleMode ops;
    for (int n = 0; n < c; ++n) {
        ops.x2.emplace_back(n, n, 2.0 * n + 1.0);
        ops.p2.emplace_back(n, n, 2.0 * n + 1.0);
        if (n + 1 < c) {
            const double s = std::sqrt(n + 1.0);
            ops.x.emplace_back(n, n + 1, s);
            ops.x.emplace_back(n + 1, n, s);
        }
        if (n + 2 < c) {
            const double s = std::sqrt((n + 1.0) * (n + 2.0));
            ops.x2.emplace_back(n, n + 2, s);
            ops.x2.emplace_back(n + 2, n, s);
            ops.p2.emplace_back(n, n + 2, -s);
            ops.p2.emplace_back(n + 2, n, -s);
        }
    }
    return ops;
}

// Embeds a single-mode operator on `mode` into the product basis.
void embed(Triplets& out, const Triplets& op, double scale, int mode, int n_modes, int c) {
    if (n_modes == 1) {
        for (const auto& t : op)
            out.emplace_back(t.row(), t.col(), scale * t.value());
        return;
    }
    for (int other = 0; other < c; ++other) {
        for (const auto& t : op) {
            const int r = mode == 0 ? t.row() * c + other : other * c + t.row();
            const int k = mode == 0 ? t.col() * c + other : other * c + t.col();
            out.emplace_back(r, k, scale * t.value());
        }
    }
}

void embed_pair(Triplets& out, const Triplets& op0, const Triplets& op1, double scale, int c) {
    for (const auto& a : op0)
        for (const auto& b : op1)
            out.emplace_back(a.row() * c + b.row(), a.col() * c + b.col(), scale * a.value() * b.value());
}

}  // namespace

QuenchMap quench_map_for(const FockInstance& instance) {
    validate(instance);
    return quench_map_from_modes(instance.omega_g, instance.omega_e, instance.T_rot, instance.displacement,
                                 instance.hbar_tilde);
}

int recommended_cutoff(const FockInstance& instance) {
    const QuenchMap map = quench_map_for(instance);
    const double a = map.takagi_values.size() ? map.takagi_values.cwiseAbs().maxCoeff() : 0.0;
    const double beta = map.beta_e.cwiseAbs().maxCoeff();
    // Squeezed tails fall like a^n; displaced ones are Poisson around beta^2.
    const double squeeze_tail = a > 1e-3 ? 30.0 / -std::log(a) : 0.0;
    const double displacement_tail = beta * beta + 10.0 * beta + 10.0;
    const int c = static_cast<int>(std::ceil(squeeze_tail + displacement_tail));
    return std::clamp(c, min_fock_cutoff, max_fock_cutoff);
}

std::complex<double> FockState::overlap(double t) const {
    std::complex<double> sum = 0.0;
    for (Eigen::Index k = 0; k < amplitudes.size(); ++k)
        sum += amplitudes[k] * amplitudes[k] * std::polar(1.0, -energies[k] * t);
    return sum;
}

FockState fock_ground_state(const FockInstance& inst, int c) {
    validate(inst);
    const int modes = inst.n_modes;
    const int dim = modes == 1 ? c : c * c;
    const SingleMode ops = single_mode_operators(c);

    // H_g / hbar in the e basis: 1/2 sum P_k^2 + 1/2 Q^T K Q + L^T Q, with
    // Q_k = sqrt(hbar / (2 w_k)) x_k and P_k = sqrt(hbar w_k / 2) p_k.
    const Eigen::VectorXd wg2 = inst.omega_g.array().square();
    const Eigen::MatrixXd K = inst.T_rot.transpose() * wg2.asDiagonal() * inst.T_rot;
    const Eigen::VectorXd L = inst.T_rot.transpose() * wg2.asDiagonal() * inst.displacement;
    const Eigen::VectorXd& we = inst.omega_e;

    Triplets entries;
    for (int k = 0; k < modes; ++k) {
        embed(entries, ops.p2, 0.25 * we[k], k, modes, c);
        embed(entries, ops.x2, 0.25 * K(k, k) / we[k], k, modes, c);
        embed(entries, ops.x, L[k] / std::sqrt(2.0 * we[k] * inst.hbar_tilde), k, modes, c);
    }
    if (modes == 2)
        embed_pair(entries, ops.x, ops.x, K(0, 1) / (2.0 * std::sqrt(we[0] * we[1])), c);

    // The compressed operator is bounded below by the exact ground energy, so
    // shifting below it keeps H - sigma positive definite.
    const double exact_ground = 0.5 * inst.omega_g.sum() - 0.5 * inst.displacement.dot(wg2.asDiagonal() *
                                                                                          inst.displacement) /
                                                                inst.hbar_tilde;
    const double sigma = exact_ground - 0.25 * inst.omega_g.minCoeff();
    for (int k = 0; k < dim; ++k)
        entries.emplace_back(k, k, -sigma);

    Eigen::SparseMatrix<double> shifted(dim, dim);
    shifted.setFromTriplets(entries.begin(), entries.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
    if (solver.info() != Eigen::Success || (solver.vectorD().array() <= 0.0).any())
        throw NumericError("Fock oracle: shifted Hamiltonian is not positive definite");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    x[0] = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd next = solver.solve(x);
        next.normalize();
        if (next.dot(x) < 0.0)
            next = -next;
        const double change = (next - x).lpNorm<Eigen::Infinity>();
        x = std::move(next);
        if (change < 1e-15)
            break;
    }

    FockState state;
    state.cutoff = c;
    state.amplitudes = std::move(x);
    state.energies.resize(dim);
    for (int idx = 0; idx < dim; ++idx) {
        if (modes == 1)
            state.energies[idx] = we[0] * idx;
        else
            state.energies[idx] = we[0] * (idx / c) + we[1] * (idx % c);
    }
    return state;
}

FockOracle::FockOracle(const FockInstance& instance) {
    validate(instance);
    const int fine = std::min(2 * instance.cutoff, max_fock_cutoff);
    const int coarse = fine == instance.cutoff ? instance.cutoff / 2 : instance.cutoff;
    coarse_ = fock_ground_state(instance, coarse);
    fine_ = fock_ground_state(instance, fine);
}

std::complex<double> FockOracle::overlap(double t) const {
    const std::complex<double> fine = fine_.overlap(t);
    const std::complex<double> coarse = coarse_.overlap(t);
    if (std::abs(fine - coarse) >= fock_certification_tolerance)
        throw CutoffError("Fock truncation not converged at cutoff " + std::to_string(coarse_.cutoff) +
                              " (change " + std::to_string(std::abs(fine - coarse)) + ")",
                          std::min(2 * fine_.cutoff, max_fock_cutoff));
    return fine;
}

double FockOracle::energy_variance() const {
    const Eigen::ArrayXd p = fine_.amplitudes.array().square();
    const double mean = (p * fine_.energies.array()).sum();
    return (p * (fine_.energies.array() - mean).square()).sum();
}

std::complex<double> fock_overlap(const FockInstance& instance, double t) {
    return FockOracle(instance).overlap(t);
}

}  // namespace ionquench
