#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Core>

namespace ionquench::detail {

/// Doolittle LU without pivoting.
///
/// Used on matrices whose Hermitian part is positive definite. Every pivot of
/// such a matrix (and of each of its Schur complements) has a positive real
/// part, so summing principal logarithms of the pivots yields a log-determinant
/// whose square-root branch is continuous in the matrix entries.
template <typename Scalar>
class UnpivotedLU {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    UnpivotedLU() = default;
    explicit UnpivotedLU(const Matrix& m) { compute(m); }

    UnpivotedLU& compute(const Matrix& m) {
        lu_ = m;
        const Eigen::Index n = lu_.rows();
        min_pivot_real_ = std::numeric_limits<double>::infinity();
        max_pivot_abs_ = 0.0;
        min_pivot_abs_ = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k) {
            const Scalar pivot = lu_(k, k);
            min_pivot_real_ = std::min(min_pivot_real_, static_cast<double>(std::real(pivot)));
            max_pivot_abs_ = std::max(max_pivot_abs_, static_cast<double>(std::abs(pivot)));
            min_pivot_abs_ = std::min(min_pivot_abs_, static_cast<double>(std::abs(pivot)));
            if (pivot == Scalar(0))
                continue;
            const Eigen::Index rest = n - k - 1;
            lu_.col(k).tail(rest) /= pivot;
            lu_.bottomRightCorner(rest, rest).noalias() -= lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
        }
        return *this;
    }

    /// Sum of principal logarithms of the pivots.
    Scalar log_determinant() const {
        Scalar sum(0);
        for (Eigen::Index k = 0; k < lu_.rows(); ++k)
            sum += std::log(lu_(k, k));
        return sum;
    }

    double min_pivot_real() const { return min_pivot_real_; }
    double pivot_ratio() const { return min_pivot_abs_ > 0.0 ? max_pivot_abs_ / min_pivot_abs_ : INFINITY; }

    template <typename Rhs>
    Matrix solve(const Eigen::MatrixBase<Rhs>& rhs) const {
        Matrix x = rhs.template cast<Scalar>();
        lu_.template triangularView<Eigen::UnitLower>().solveInPlace(x);
        lu_.template triangularView<Eigen::Upper>().solveInPlace(x);
        return x;
    }

private:
    Matrix lu_;
    double min_pivot_real_ = 0.0;
    double max_pivot_abs_ = 0.0;
    double min_pivot_abs_ = 0.0;
};

}  // namespace ionquench::detail
