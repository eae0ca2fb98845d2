#pragma once

// Brute-force reference for the motional overlap of one or two modes.
//
// The g-mode Hamiltonian is written in the truncated Fock basis of the e-modes
// through Q^g = T Q^e + D, P^g = T P^e; its ground state is found numerically
// and propagated with H_e = sum_k omega_e_k n_k. The zero-point energy and the
// classical energy offset only contribute a global phase and are dropped, the
// same convention as the closed-form overlap.

#include <complex>

#include <Eigen/Core>

#include "ionquench/quench.hpp"

namespace ionquench {

struct FockInstance {
    int n_modes = 1;
    Eigen::VectorXd omega_g;
    Eigen::VectorXd omega_e;
    Eigen::MatrixXd T_rot;         // orthogonal, n_modes x n_modes
    Eigen::VectorXd displacement;  // D in the g-mode basis
    int cutoff = 40;               // Fock states per mode
    double hbar_tilde = 1.0;
};

inline constexpr int min_fock_cutoff = 20;
inline constexpr int max_fock_cutoff = 120;
inline constexpr double fock_certification_tolerance = 1e-9;

Eigen::Matrix2d rotation(double angle);

/// Synthetic quench map with exactly the instance's frequencies, T and D.
QuenchMap quench_map_for(const FockInstance& instance);

/// Cutoff estimate from the squeezing and displacement of the instance.
int recommended_cutoff(const FockInstance& instance);

/// Ground state of H_g expanded on the e-mode Fock states at one cutoff.
struct FockState {
    int cutoff = 0;
    Eigen::VectorXd amplitudes;  // index n_1 * cutoff + n_2
    Eigen::VectorXd energies;    // sum_k omega_e_k n_k

    std::complex<double> overlap(double t) const;
};

FockState fock_ground_state(const FockInstance& instance, int cutoff);

/// Certified oracle: holds the instance at `cutoff` and at twice the cutoff
/// (capped at max_fock_cutoff) and rejects answers on which they disagree.
class FockOracle {
public:
    explicit FockOracle(const FockInstance& instance);

    std::complex<double> overlap(double t) const;

    /// Variance of H_e / hbar in the initial state, i.e. -eta.
    double energy_variance() const;

    const FockState& state() const { return fine_; }

private:
    FockState coarse_;
    FockState fine_;
};

std::complex<double> fock_overlap(const FockInstance& instance, double t);

}  // namespace ionquench
