#include "ionquench/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionquench/detail/parallel.hpp"
#include "ionquench/detail/unpivoted_lu.hpp"
#include "ionquench/errors.hpp"
#include "ionquench/scenario.hpp"

namespace ionquench {

namespace {

using ComplexLU = detail::UnpivotedLU<Complex>;

constexpr Complex I_unit{0.0, 1.0};

struct Blocks {
    Eigen::MatrixXcd Lambda_plus;
    Eigen::MatrixXcd Lambda_minus;
    Eigen::VectorXcd S_plus;
    Eigen::VectorXcd S_minus;
};

Blocks assemble_blocks(const QuenchMap& map, double t) {
    const Eigen::VectorXcd phase = (-I_unit * t * map.omega_e.cast<Complex>()).array().exp();
    const Eigen::MatrixXcd A = map.A.cast<Complex>();
    const Eigen::MatrixXcd A_t = phase.asDiagonal() * A * phase.asDiagonal();

    // S_j(beta) = sum_k A_jk beta_k - beta_j^*
    const Eigen::VectorXcd beta = map.beta_e.cast<Complex>();
    const Eigen::VectorXcd s_beta = A * beta - beta.conjugate();
    const Eigen::VectorXcd s_beta_conj = A * beta.conjugate() - beta;

    Blocks b;
    b.Lambda_plus = 0.5 * (A_t + A);
    b.Lambda_minus = 0.5 * (A_t - A);
    b.S_plus = s_beta_conj + phase.cwiseProduct(s_beta);
    b.S_minus = s_beta_conj - phase.cwiseProduct(s_beta);
    return b;
}

void require_convergent(const ComplexLU& lu, const char* which) {
    if (!(lu.min_pivot_real() > 0.0))
        throw ConvergenceViolation(std::string("overlap integral diverges: ") + which +
                                   " has a pivot with non-positive real part");
    if (!(lu.pivot_ratio() < 1e14))
        throw NumericError(std::string("overlap integral: ") + which + " is numerically singular (pivot ratio " +
                           std::to_string(lu.pivot_ratio()) + ")");
}

double log_abs_ground_overlap(const QuenchMap& map) {
    const Eigen::VectorXd& b = map.beta_e;
    return std::log(map.Z) + 0.5 * b.dot(map.A * b) - 0.5 * b.squaredNorm();
}

Complex log_overlap_schur(const QuenchMap& map, double t) {
    const Eigen::Index n = map.size();
    const Blocks b = assemble_blocks(map, t);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);

    // Omega = [[Upsilon, -i L-], [-i L-, Xi]] with Xi = 1 + L+, Upsilon = 1 - L+.
    const ComplexLU xi(I + b.Lambda_plus);
    require_convergent(xi, "Xi");
    const Eigen::MatrixXcd xi_inv_lm = xi.solve(b.Lambda_minus);
    const Eigen::MatrixXcd theta_m = I - b.Lambda_plus + b.Lambda_minus * xi_inv_lm;
    const ComplexLU theta(theta_m);
    require_convergent(theta, "Theta");

    // w = (S+, -i S-); apply the partitioned inverse of Omega.
    const Eigen::VectorXcd w1 = b.S_plus;
    const Eigen::VectorXcd w2 = -I_unit * b.S_minus;
    const Eigen::VectorXcd y2 = xi.solve(w2);
    const Eigen::VectorXcd x1 = theta.solve(w1 + I_unit * (b.Lambda_minus * y2));
    const Eigen::VectorXcd x2 = xi.solve(w2 + I_unit * (b.Lambda_minus * x1));
    const Complex quadratic = (w1.transpose() * x1)(0) + (w2.transpose() * x2)(0);

    const Complex log_det = xi.log_determinant() + theta.log_determinant();
    return 2.0 * log_abs_ground_overlap(map) + 0.25 * quadratic - 0.5 * log_det;
}

Complex log_overlap_direct(const QuenchMap& map, double t) {
    const OmegaAssembly omega = assemble_omega(map, t);
    const ComplexLU lu(omega.Omega);
    require_convergent(lu, "Omega");
    const Eigen::VectorXcd x = lu.solve(omega.w);
    const Complex quadratic = (omega.w.transpose() * x)(0);
    return 2.0 * log_abs_ground_overlap(map) + 0.25 * quadratic - 0.5 * lu.log_determinant();
}

}  // namespace

OmegaAssembly assemble_omega(const QuenchMap& map, double t) {
    const Eigen::Index n = map.size();
    const Blocks b = assemble_blocks(map, t);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);

    OmegaAssembly out;
    out.Lambda_plus = b.Lambda_plus;
    out.Lambda_minus = b.Lambda_minus;
    out.S_plus = b.S_plus;
    out.S_minus = b.S_minus;
    out.Omega.resize(2 * n, 2 * n);
    out.Omega.topLeftCorner(n, n) = I - b.Lambda_plus;
    out.Omega.topRightCorner(n, n) = -I_unit * b.Lambda_minus;
    out.Omega.bottomLeftCorner(n, n) = -I_unit * b.Lambda_minus;
    out.Omega.bottomRightCorner(n, n) = I + b.Lambda_plus;
    out.w.resize(2 * n);
    out.w.head(n) = b.S_plus;
    out.w.tail(n) = -I_unit * b.S_minus;
    return out;
}

Complex log_overlap_at(const QuenchMap& map, double t, OverlapMethod method) {
    if (!std::isfinite(t))
        throw InvalidInput("overlap_at: time must be finite");
    const Complex value = method == OverlapMethod::schur ? log_overlap_schur(map, t) : log_overlap_direct(map, t);
    // The evaluation still runs at t = 0 so a non-convergent map is reported.
    return t == 0.0 ? Complex{} : value;
}

Complex overlap_at(const QuenchMap& map, double t, OverlapMethod method) {
    if (t < 0.0)
        throw InvalidInput("overlap_at: time must be non-negative");
    return std::exp(log_overlap_at(map, t, method));
}

VisibilitySeries visibility_series(const QuenchMap& map, const Eigen::Ref<const Eigen::VectorXd>& times,
                                   int threads) {
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
            throw InvalidInput("visibility_series: time grid must be sorted and non-negative");
    }
    VisibilitySeries series;
    series.times = times;
    series.overlap.resize(times.size());
    series.visibility.resize(times.size());
    detail::parallel_for(static_cast<std::size_t>(times.size()), threads, [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        series.overlap[i] = overlap_at(map, times[i]);
        series.visibility[i] = std::abs(series.overlap[i]);
    });
    return series;
}

std::vector<double> revival_times(const VisibilitySeries& series, double threshold) {
    const Eigen::VectorXd& v = series.visibility;
    std::vector<double> out;
    Eigen::Index k = 0;
    while (k < v.size() && v[k] >= threshold)
        ++k;
    for (++k; k + 1 < v.size(); ++k) {
        if (v[k] > threshold && v[k] > v[k - 1] && v[k] >= v[k + 1])
            out.push_back(series.times[k]);
    }
    return out;
}

std::optional<double> first_revival_time(const VisibilitySeries& series, double threshold) {
    const std::vector<double> times = revival_times(series, threshold);
    if (times.empty())
        return std::nullopt;
    return times.front();
}

double revival_spacing(const std::vector<double>& times) {
    const auto n = static_cast<Eigen::Index>(times.size());
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const Eigen::ArrayXd t = Eigen::Map<const Eigen::ArrayXd>(times.data(), n);
    const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
    const Eigen::ArrayXd dk = k - k.mean();
    return (dk * (t - t.mean())).sum() / dk.square().sum();
}

double ramsey_probability(Complex overlap, double phi) {
    if (!(std::abs(overlap) <= 1.0 + 1e-9))
        throw InvalidInput("ramsey_probability: |overlap| exceeds 1");
    return 0.5 * (1.0 + std::real(std::exp(I_unit * phi) * overlap));
}

double curvature(const QuenchMap& map) {
    const double h = 1e-3 / map.omega_e.maxCoeff();
    // ln V is even in t with ln V(0) = 0, and (ln V)''(0) = V''(0).
    const double base = std::real(log_overlap_at(map, 0.0));
    auto second_difference = [&](double step) {
        return 2.0 * (std::real(log_overlap_at(map, step)) - base) / (step * step);
    };
    const double eta = (4.0 * second_difference(0.5 * h) - second_difference(h)) / 3.0;
    if (eta > 1e-9)
        throw NumericConsistencyError("curvature: positive eta " + std::to_string(eta));
    return std::min(eta, 0.0);
}

CurvatureSurface curvature_surface(int ion_count, const Eigen::Ref<const Eigen::VectorXd>& delta_grid,
                                   const Eigen::Ref<const Eigen::VectorXd>& g_grid, double hbar_tilde, int threads) {
    CurvatureSurface surface;
    surface.delta_grid = delta_grid;
    surface.g_grid = g_grid;
    const Eigen::Index rows = delta_grid.size();
    const Eigen::Index cols = g_grid.size();
    surface.eta = Eigen::MatrixXd::Constant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> messages(static_cast<std::size_t>(rows * cols));

    detail::parallel_for(static_cast<std::size_t>(rows * cols), threads, [&](std::size_t k) {
        const Eigen::Index i = static_cast<Eigen::Index>(k) / cols;
        const Eigen::Index j = static_cast<Eigen::Index>(k) % cols;
        try {
            const QuenchScenario s = build_scenario_at(ion_count, g_grid[j], delta_grid[i], hbar_tilde);
            surface.eta(i, j) = curvature(s.map);
        } catch (const Error& e) {
            messages[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < messages.size(); ++k) {
        if (!messages[k].empty())
            surface.errors.push_back({static_cast<Eigen::Index>(k) / cols, static_cast<Eigen::Index>(k) % cols,
                                      messages[k]});
    }
    return surface;
}

}  // namespace ionquench
