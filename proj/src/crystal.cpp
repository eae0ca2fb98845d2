#include "ionquench/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ionquench/errors.hpp"

namespace ionquench {

std::string_view to_string(InternalState state) {
    return state == InternalState::ground ? "g" : "e";
}

std::string_view to_string(Structure structure) {
    return structure == Structure::linear ? "linear" : "zigzag";
}

int central_ion(int ion_count) {
    if (ion_count < 1 || ion_count % 2 == 0)
        throw InvalidInput("the central ion is only defined for odd N, got " + std::to_string(ion_count));
    return ion_count / 2;
}

CrystalModel crystal_model(const DimensionlessParams& params, int ion_count) {
    return {ion_count, params.alpha, params.alpha_dip};
}

CrystalModel crystal_model_at(int ion_count, double g, double delta) {
    const double alpha_c = critical_aspect_ratio(ion_count);
    return {ion_count, alpha_c * (1.0 + g), alpha_c * delta};
}

namespace {

void check_layout(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model) {
    if (model.ion_count < 2)
        throw InvalidInput("at least two ions are required");
    if (positions.size() != 2 * model.ion_count)
        throw InvalidInput("positions must have length 2N");
}

// Index of the ion carrying the spin-dependent term, or -1 in the ground state.
int dip_ion(const CrystalModel& model, InternalState state) {
    if (state == InternalState::ground)
        return -1;
    return central_ion(model.ion_count);
}

double pair_distance(const Eigen::Ref<const Eigen::VectorXd>& r, int n, int i, int l) {
    const double dx = r[i] - r[l];
    const double dy = r[n + i] - r[n + l];
    const double d = std::hypot(dx, dy);
    if (!(d > 0.0))
        throw SingularConfiguration("ions " + std::to_string(i) + " and " + std::to_string(l) + " coincide");
    return d;
}

}  // namespace

double potential_energy(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                        InternalState state) {
    check_layout(positions, model);
    const int n = model.ion_count;
    const auto x = positions.head(n);
    const auto y = positions.tail(n);

    double energy = 0.5 * (x.squaredNorm() + model.alpha * y.squaredNorm());
    for (int i = 0; i < n; ++i)
        for (int l = i + 1; l < n; ++l)
            energy += 1.0 / pair_distance(positions, n, i, l);
    if (const int c = dip_ion(model, state); c >= 0)
        energy += 0.5 * model.alpha_dip * y[c] * y[c];
    return energy;
}

Eigen::VectorXd potential_gradient(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                                   InternalState state) {
    check_layout(positions, model);
    const int n = model.ion_count;
    Eigen::VectorXd grad(2 * n);
    grad.head(n) = positions.head(n);
    grad.tail(n) = model.alpha * positions.tail(n);

    for (int i = 0; i < n; ++i) {
        for (int l = i + 1; l < n; ++l) {
            const double d = pair_distance(positions, n, i, l);
            const double inv3 = 1.0 / (d * d * d);
            const double fx = (positions[i] - positions[l]) * inv3;
            const double fy = (positions[n + i] - positions[n + l]) * inv3;
            grad[i] -= fx;
            grad[l] += fx;
            grad[n + i] -= fy;
            grad[n + l] += fy;
        }
    }
    if (const int c = dip_ion(model, state); c >= 0)
        grad[n + c] += model.alpha_dip * positions[n + c];
    return grad;
}

Eigen::MatrixXd potential_hessian(const Eigen::Ref<const Eigen::VectorXd>& positions, const CrystalModel& model,
                                  InternalState state) {
    check_layout(positions, model);
    const int n = model.ion_count;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        hess(i, i) = 1.0;
        hess(n + i, n + i) = model.alpha;
    }

    for (int i = 0; i < n; ++i) {
        for (int l = i + 1; l < n; ++l) {
            const double d = pair_distance(positions, n, i, l);
            const double dx = positions[i] - positions[l];
            const double dy = positions[n + i] - positions[n + l];
            const double inv5 = 1.0 / std::pow(d, 5);
            // d^2 (1/|r|) / dr dr^T = (3 r r^T - |r|^2 I) / |r|^5
            const double kxx = (3.0 * dx * dx - d * d) * inv5;
            const double kyy = (3.0 * dy * dy - d * d) * inv5;
            const double kxy = 3.0 * dx * dy * inv5;

            const int xi = i, xl = l, yi = n + i, yl = n + l;
            hess(xi, xi) += kxx;
            hess(xl, xl) += kxx;
            hess(xi, xl) -= kxx;
            hess(xl, xi) -= kxx;

            hess(yi, yi) += kyy;
            hess(yl, yl) += kyy;
            hess(yi, yl) -= kyy;
            hess(yl, yi) -= kyy;

            hess(xi, yi) += kxy;
            hess(yi, xi) += kxy;
            hess(xl, yl) += kxy;
            hess(yl, xl) += kxy;
            hess(xi, yl) -= kxy;
            hess(yl, xi) -= kxy;
            hess(xl, yi) -= kxy;
            hess(yi, xl) -= kxy;
        }
    }
    if (const int c = dip_ion(model, state); c >= 0)
        hess(n + c, n + c) += model.alpha_dip;
    return hess;
}

Structure classify_structure(const Eigen::Ref<const Eigen::VectorXd>& positions) {
    const auto n = positions.size() / 2;
    return positions.tail(n).cwiseAbs().maxCoeff() < linear_deadband ? Structure::linear : Structure::zigzag;
}

Structure classify_structure(const EquilibriumConfiguration& config) {
    return classify_structure(config.positions);
}

namespace {

struct MinimizerResult {
    Eigen::VectorXd positions;
    double energy = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
};

// Damped Newton with backtracking; gradient descent whenever the Hessian is
// not positive definite.
MinimizerResult minimize(const CrystalModel& model, InternalState state, Eigen::VectorXd r,
                         const MinimizerOptions& options) {
    MinimizerResult result;
    double energy = potential_energy(r, model, state);
    Eigen::VectorXd grad = potential_gradient(r, model, state);
    double gnorm = grad.lpNorm<Eigen::Infinity>();

    for (int iter = 0; iter < options.max_iterations && gnorm > options.target_tolerance; ++iter) {
        const Eigen::MatrixXd hess = potential_hessian(r, model, state);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        const bool positive_definite =
            ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all() && ldlt.isPositive();

        Eigen::VectorXd step = positive_definite ? Eigen::VectorXd(ldlt.solve(-grad)) : Eigen::VectorXd(-grad);
        const double slope = grad.dot(step);
        if (!(slope < 0.0))
            step = -grad;

        bool accepted = false;
        for (double t = 1.0; t > 1e-12; t *= 0.5) {
            const Eigen::VectorXd trial = r + t * step;
            double trial_energy = 0.0;
            Eigen::VectorXd trial_grad;
            try {
                trial_energy = potential_energy(trial, model, state);
                trial_grad = potential_gradient(trial, model, state);
            } catch (const SingularConfiguration&) {
                continue;
            }
            const double trial_gnorm = trial_grad.lpNorm<Eigen::Infinity>();
            // Near the minimum energy differences drop below round-off, so a
            // full Newton step that shrinks the gradient is accepted as well.
            const bool decreases = trial_energy <= energy + 1e-4 * t * grad.dot(step);
            const bool newton_close = positive_definite && t == 1.0 && trial_gnorm < gnorm &&
                                      std::abs(trial_energy - energy) <= 1e-12 * (1.0 + std::abs(energy));
            if (decreases || newton_close) {
                r = trial;
                energy = trial_energy;
                grad = std::move(trial_grad);
                gnorm = trial_gnorm;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
    }

    result.positions = std::move(r);
    result.energy = energy;
    result.gradient_norm = gnorm;
    result.converged = gnorm < options.gradient_tolerance;
    return result;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// Sorts ions by x and fixes the reflection branch of a zigzag.
void canonicalize(Eigen::VectorXd& r, int n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return r[a] < r[b]; });
    Eigen::VectorXd sorted(2 * n);
    for (int i = 0; i < n; ++i) {
        sorted[i] = r[order[i]];
        sorted[n + i] = r[n + order[i]];
    }
    r = std::move(sorted);

    if (classify_structure(r) != Structure::zigzag)
        return;
    // Central ion at y > 0; for even N (test fixtures) the first displaced ion.
    int pivot = n / 2;
    if (n % 2 == 0 || std::abs(r[n + pivot]) < linear_deadband) {
        for (int i = 0; i < n; ++i) {
            if (std::abs(r[n + i]) >= linear_deadband) {
                pivot = i;
                break;
            }
        }
    }
    if (r[n + pivot] < 0.0)
        r.tail(n) *= -1.0;
}

Eigen::VectorXd linear_ansatz(int n) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i)
        r[i] = static_cast<double>(i) - 0.5 * (n - 1);
    return r;
}

}  // namespace

EquilibriumConfiguration find_equilibrium(const CrystalModel& model, InternalState state,
                                          const std::optional<Eigen::VectorXd>& seed,
                                          const MinimizerOptions& options) {
    const int n = model.ion_count;
    if (n < 2)
        throw InvalidInput("at least two ions are required");
    if (state == InternalState::excited)
        central_ion(n);

    std::vector<Eigen::VectorXd> starts;
    if (seed) {
        if (seed->size() != 2 * n)
            throw InvalidInput("seed must have length 2N");
        starts.push_back(*seed);
    } else {
        Eigen::VectorXd ansatz = linear_ansatz(n);
        starts.push_back(ansatz);
        for (int i = 0; i < n; ++i)
            ansatz[n + i] = ((i - n / 2) % 2 == 0 ? 0.1 : -0.1);
        starts.push_back(ansatz);
    }

    std::optional<MinimizerResult> best;
    MinimizerResult last;
    double worst_eigenvalue = 0.0;
    for (const auto& start : starts) {
        MinimizerResult candidate = minimize(model, state, start, options);
        last = candidate;
        if (!candidate.converged)
            continue;
        const double lowest = min_eigenvalue(potential_hessian(candidate.positions, model, state));
        if (lowest < -1e-9) {
            worst_eigenvalue = std::min(worst_eigenvalue, lowest);
            continue;
        }
        if (!best || candidate.energy < best->energy - 1e-14 * std::abs(candidate.energy))
            best = std::move(candidate);
    }

    if (!best) {
        if (last.converged)
            throw UnstableStructure("every equilibrium found is a saddle point", worst_eigenvalue);
        throw ConvergenceError("equilibrium search did not converge", last.positions, last.gradient_norm);
    }

    EquilibriumConfiguration config;
    config.state = state;
    config.positions = std::move(best->positions);
    canonicalize(config.positions, n);
    config.energy = best->energy;
    config.structure = classify_structure(config.positions);
    return config;
}

Eigen::VectorXd linear_chain_positions(int ion_count) {
    if (ion_count < 2)
        throw InvalidInput("at least two ions are required");
    // The axial problem decouples from y; a stiff alpha keeps the Newton steps definite.
    const CrystalModel axial{ion_count, 10.0 * ion_count * ion_count, 0.0};
    MinimizerResult result = minimize(axial, InternalState::ground, linear_ansatz(ion_count), {});
    if (!result.converged)
        throw ConvergenceError("linear chain search did not converge", result.positions, result.gradient_norm);
    canonicalize(result.positions, ion_count);
    result.positions.tail(ion_count).setZero();
    return result.positions;
}

namespace {

// Transverse block of the linear-chain Hessian without the trap terms: C with
// C_ii = -sum_l 1/|x_i - x_l|^3 and C_il = 1/|x_i - x_l|^3.
Eigen::MatrixXd transverse_coulomb_block(const Eigen::VectorXd& chain, int n) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
            if (i == l)
                continue;
            const double d = std::abs(chain[i] - chain[l]);
            const double k = 1.0 / (d * d * d);
            block(i, l) += k;
            block(i, i) -= k;
        }
    }
    return block;
}

double transverse_min_eigenvalue(const Eigen::MatrixXd& coulomb, double alpha, double alpha_dip, int dip_index) {
    Eigen::MatrixXd block = coulomb;
    block.diagonal().array() += alpha;
    if (dip_index >= 0)
        block(dip_index, dip_index) += alpha_dip;
    return min_eigenvalue(block);
}

template <typename F>
double bisect(F&& f, double lo, double hi, double tolerance, const char* what) {
    double flo = f(lo);
    double fhi = f(hi);
    constexpr double slack = 1e-12;
    if (flo > slack || fhi < -slack)
        throw SearchError(std::string(what) + ": bracket does not straddle the instability", lo, hi);
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double linear_transverse_min_eigenvalue(const CrystalModel& model, InternalState state) {
    const int n = model.ion_count;
    const Eigen::MatrixXd coulomb = transverse_coulomb_block(linear_chain_positions(n), n);
    return transverse_min_eigenvalue(coulomb, model.alpha, model.alpha_dip, dip_ion(model, state));
}

double critical_aspect_ratio(int ion_count) {
    const int n = ion_count;
    const Eigen::MatrixXd coulomb = transverse_coulomb_block(linear_chain_positions(n), n);
    auto f = [&](double alpha) { return transverse_min_eigenvalue(coulomb, alpha, 0.0, -1); };
    return bisect(f, 1.0, 10.0 * n * n, 1e-12, "critical_aspect_ratio");
}

double phase_boundary(int ion_count, double delta) {
    if (!(delta >= 0.0))
        throw InvalidInput("delta must be non-negative");
    const int n = ion_count;
    const int c = central_ion(n);
    const Eigen::MatrixXd coulomb = transverse_coulomb_block(linear_chain_positions(n), n);
    auto lambda = [&](double alpha) { return transverse_min_eigenvalue(coulomb, alpha, 0.0, -1); };
    const double alpha_c = bisect(lambda, 1.0, 10.0 * n * n, 1e-13, "critical_aspect_ratio");
    auto f = [&](double g) { return transverse_min_eigenvalue(coulomb, alpha_c * (1.0 + g), alpha_c * delta, c); };
    return bisect(f, -0.5, 0.0, 1e-12, "phase_boundary");
}

DimensionlessParams resolve_dimensionless(const TrapSpec& spec) {
    validate(spec);
    return derive_dimensionless(spec, critical_aspect_ratio(spec.ion_count));
}

PhasePoint phase_point(int ion_count, double g, double delta) {
    const CrystalModel model = crystal_model_at(ion_count, g, delta);
    PhasePoint point;
    point.g = g;
    point.delta = delta;
    point.structure_g = find_equilibrium(model, InternalState::ground).structure;
    point.structure_e = find_equilibrium(model, InternalState::excited).structure;
    return point;
}

}  // namespace ionquench
