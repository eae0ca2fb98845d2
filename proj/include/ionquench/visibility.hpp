#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ionquench/quench.hpp"

namespace ionquench {

using Complex = std::complex<double>;

/// Matrices and vectors entering the Gaussian overlap integral at time t.
struct OmegaAssembly {
    Eigen::MatrixXcd Lambda_plus;   // 1/2 A_jk [exp(-i(w_j + w_k) t) + 1]
    Eigen::MatrixXcd Lambda_minus;  // 1/2 A_jk [exp(-i(w_j + w_k) t) - 1]
    Eigen::VectorXcd S_plus;
    Eigen::VectorXcd S_minus;
    Eigen::MatrixXcd Omega;  // 4N x 4N, complex symmetric
    Eigen::VectorXcd w;
};

OmegaAssembly assemble_omega(const QuenchMap& map, double t);

enum class OverlapMethod {
    schur,   // partitioned evaluation through the Schur complement of 1 + Lambda+
    direct,  // full 4N x 4N factorization, kept for cross-checks
};

/// Closed-form motional overlap O(t) = exp(w^T Omega^{-1} w / 4) / sqrt(det Omega) |G0|^2.
///
/// Times are in units of 1/nu_x. Only |O| is physical; the phase follows the
/// continuous branch of sqrt(det Omega) starting from det Omega > 0 at t = 0.
Complex overlap_at(const QuenchMap& map, double t, OverlapMethod method = OverlapMethod::schur);

/// log O(t), same conventions as overlap_at.
Complex log_overlap_at(const QuenchMap& map, double t, OverlapMethod method = OverlapMethod::schur);

struct VisibilitySeries {
    Eigen::VectorXd times;
    Eigen::VectorXcd overlap;
    Eigen::VectorXd visibility;
};

VisibilitySeries visibility_series(const QuenchMap& map, const Eigen::Ref<const Eigen::VectorXd>& times,
                                   int threads = 1);

inline constexpr double revival_threshold = 0.05;

/// Local maxima of V above `threshold` that come after V first drops below it.
std::vector<double> revival_times(const VisibilitySeries& series, double threshold = revival_threshold);

/// First entry of revival_times, if any.
std::optional<double> first_revival_time(const VisibilitySeries& series, double threshold = revival_threshold);

/// Least-squares slope of revival time against revival ordinal; NaN for fewer than two.
double revival_spacing(const std::vector<double>& times);

/// Ramsey ground-state probability 1/2 (1 + Re[exp(i phi) O]).
double ramsey_probability(Complex overlap, double phi);

/// Short-time curvature eta in V(t) ~ 1 + eta t^2 / 2 (units of nu_x^2).
double curvature(const QuenchMap& map);

struct CurvatureSurface {
    Eigen::VectorXd delta_grid;
    Eigen::VectorXd g_grid;
    Eigen::MatrixXd eta;  // rows: delta, cols: g; NaN where a point failed
    struct PointError {
        Eigen::Index delta_index;
        Eigen::Index g_index;
        std::string message;
    };
    std::vector<PointError> errors;
};

CurvatureSurface curvature_surface(int ion_count, const Eigen::Ref<const Eigen::VectorXd>& delta_grid,
                                   const Eigen::Ref<const Eigen::VectorXd>& g_grid, double hbar_tilde,
                                   int threads = 1);

}  // namespace ionquench
