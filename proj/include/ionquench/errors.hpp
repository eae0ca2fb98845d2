#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ionquench {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Two ions coincide; the Coulomb term diverges.
class SingularConfiguration : public Error {
public:
    using Error::Error;
};

/// The equilibrium search ran out of iterations.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate, double gradient_norm)
        : Error(what), last_iterate_(std::move(last_iterate)), gradient_norm_(gradient_norm) {}

    const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    Eigen::VectorXd last_iterate_;
    double gradient_norm_;
};

/// A bisection bracket did not straddle a sign change.
class SearchError : public Error {
public:
    SearchError(const std::string& what, double lo, double hi) : Error(what), lo_(lo), hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// The Hessian at an equilibrium has a negative eigenvalue.
class UnstableStructure : public Error {
public:
    UnstableStructure(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

class IllConditionedMap : public Error {
public:
    IllConditionedMap(const std::string& what, double condition)
        : Error(what), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A squeezing kernel with spectral norm >= 1.
class NonPhysicalMap : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// The Gaussian overlap integral does not converge (Re spectrum of Omega not positive).
class ConvergenceViolation : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class NumericConsistencyError : public Error {
public:
    using Error::Error;
};

/// Fock truncation did not converge; carries a suggested cutoff.
class CutoffError : public Error {
public:
    CutoffError(const std::string& what, int suggested_cutoff)
        : Error(what), suggested_cutoff_(suggested_cutoff) {}

    int suggested_cutoff() const noexcept { return suggested_cutoff_; }

private:
    int suggested_cutoff_;
};

}  // namespace ionquench
