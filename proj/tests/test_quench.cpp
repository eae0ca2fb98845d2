#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ionquench/errors.hpp"
#include "ionquench/quench.hpp"
#include "ionquench/scenario.hpp"
#include "ionquench/units.hpp"

using namespace ionquench;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }
Eigen::MatrixXd m1(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

Eigen::MatrixXd random_orthogonal(int n, std::mt19937& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = normal(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

double hbar_be() { return reduced_hbar(9.0122, 1.0, 2.0 * constants::pi * 1e6); }

}  // namespace

TEST_CASE("identity quench") {
    const CrystalModel m = crystal_model_at(3, -0.05, 0.0);
    const EquilibriumConfiguration c = find_equilibrium(m, InternalState::ground);
    const NormalModeBasis b = normal_modes(c, m);
    const QuenchMap q = build_quench_map(b, b, hbar_be());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(6, 6);
    CHECK((q.T - I).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.D.cwiseAbs().maxCoeff() == 0.0);
    CHECK((q.u - I).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.v.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.A.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(q.beta_e.cwiseAbs().maxCoeff() == 0.0);
    CHECK(q.Z == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.G0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single-mode frequency quench") {
    const QuenchMap q = quench_map_from_modes(v1(1.0), v1(2.0), m1(1.0), v1(0.0), 1.0);
    CHECK(q.u(0, 0) == doctest::Approx((std::sqrt(2.0) + std::sqrt(0.5)) / 2.0).epsilon(1e-14));
    CHECK(q.v(0, 0) == doctest::Approx((std::sqrt(2.0) - std::sqrt(0.5)) / 2.0).epsilon(1e-14));
    CHECK(q.u(0, 0) == doctest::Approx(1.0607).epsilon(1e-4));
    CHECK(q.v(0, 0) == doctest::Approx(0.3536).epsilon(1e-4));
    CHECK(q.A(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(q.Z == doctest::Approx(std::pow(8.0 / 9.0, 0.25)).epsilon(1e-14));
    CHECK(q.G0 == doctest::Approx(q.Z).epsilon(1e-14));
    CHECK(q.xi(0, 0) == doctest::Approx(std::atanh(1.0 / 3.0)).epsilon(1e-14));
    CHECK(q.xi(0, 0) == doctest::Approx(0.3466).epsilon(1e-4));
}

TEST_CASE("single-mode displacement quench") {
    const double w = 1.7, hbar = 0.3;
    const double D = std::sqrt(2.0 * hbar / w);  // beta = 1
    const QuenchMap q = quench_map_from_modes(v1(w), v1(w), m1(1.0), v1(D), hbar);
    CHECK(q.beta_g[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(q.A(0, 0)) < 1e-15);
    CHECK(q.beta_e[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(q.G0 == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(q.G0 == doctest::Approx(0.6065).epsilon(1e-4));
}

TEST_CASE("beta_e is a pure sign flip for u = 1, v = 0") {
    const Eigen::Vector3d w(0.7, 1.1, 1.9);
    const Eigen::Vector3d D(0.1, -0.2, 0.05);
    const QuenchMap q = quench_map_from_modes(w, w, Eigen::MatrixXd::Identity(3, 3), D, 0.5);
    CHECK((q.beta_e + q.beta_g).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("takagi factorisation") {
    const TakagiFactors zero = takagi_symmetric(Eigen::MatrixXd::Zero(3, 3));
    CHECK(zero.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK((zero.Lambda.transpose() * zero.Lambda - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::Matrix2d d;
    d << 0.2, 0.0, 0.0, -0.5;
    const TakagiFactors diag = takagi_symmetric(d);
    Eigen::VectorXd a = diag.a;
    std::sort(a.begin(), a.end());
    CHECK(a[0] == doctest::Approx(-0.5));
    CHECK(a[1] == doctest::Approx(0.2));
    CHECK((diag.Lambda.cwiseAbs().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);

    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd O = random_orthogonal(6, rng);
        Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(6, -0.7, 0.55);
        const Eigen::MatrixXd A = O * s.asDiagonal() * O.transpose();
        const TakagiFactors f = takagi_symmetric(A);
        CHECK((f.Lambda * f.a.asDiagonal() * f.Lambda.transpose() - A).cwiseAbs().maxCoeff() < 1e-10);

        // xi round trip: tanh of the squeezing parameters restores A.
        const Eigen::MatrixXd xi = squeezing_parameters(f.Lambda, f.a);
        CHECK((xi - xi.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xi);
        const Eigen::VectorXd t = es.eigenvalues().array().tanh();
        CHECK((es.eigenvectors() * t.asDiagonal() * es.eigenvectors().transpose() - A).cwiseAbs().maxCoeff() < 1e-10);
    }

    Eigen::Matrix2d bad;
    bad << 0.5, 0.6, 0.6, 0.5;
    CHECK_THROWS_AS(takagi_symmetric(bad), NonPhysicalMap);
}

TEST_CASE("squeezing parameters") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    CHECK(squeezing_parameters(I, Eigen::VectorXd::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::Vector3d a(0.1, -0.3, 0.6);
    const Eigen::MatrixXd xi = squeezing_parameters(I, a);
    for (int k = 0; k < 3; ++k)
        CHECK(xi(k, k) == doctest::Approx(std::atanh(a[k])).epsilon(1e-15));
    CHECK_THROWS_AS(squeezing_parameters(I, Eigen::Vector3d(0.1, 1.0, 0.0)), DomainError);
}

TEST_CASE("normalisation agrees with the trace series") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 5;
        const Eigen::MatrixXd O = random_orthogonal(n, rng);
        Eigen::VectorXd s(n);
        for (int k = 0; k < n; ++k)
            s[k] = uni(rng);
        const Eigen::MatrixXd A = O * s.asDiagonal() * O.transpose();
        const Eigen::MatrixXd A2 = A * A;
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
        double series = 0.0;
        for (int l = 1; l <= 40; ++l) {
            power = power * A2;
            series += power.trace() / (2.0 * l);
        }
        const double z_series = std::exp(-0.5 * series);
        const double z_det = std::pow((Eigen::MatrixXd::Identity(n, n) - A2).determinant(), 0.25);
        CHECK(z_series == doctest::Approx(z_det).epsilon(1e-8));
    }
}

TEST_CASE("crystal quench map identities") {
    const double hbar = hbar_be();
    for (double g : {0.02, -0.005, -0.1}) {
        const QuenchScenario s = build_scenario_at(3, g, 0.025, hbar);
        const BogoliubovResiduals r = bogoliubov_residuals(s.map);
        CHECK(r.max() < 1e-10);
        CHECK(s.map.takagi_values.cwiseAbs().maxCoeff() < 1.0);
        CHECK(s.map.G0 > 0.0);
        CHECK(s.map.G0 <= 1.0);

        // Swapping the roles of the two structures leaves the ground-state overlap unchanged.
        const QuenchMap swapped = build_quench_map(s.basis_e, s.basis_g, hbar);
        CHECK(std::abs(swapped.G0 - s.map.G0) <= 1e-10 * std::max(s.map.G0, 1e-300));
    }
}

TEST_CASE("ill-conditioned coefficients are rejected") {
    const Eigen::Vector2d wg(1.0, 1.0);
    const Eigen::Vector2d we(1e-30, 1.0);
    Eigen::Matrix2d T;
    T << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
    CHECK_THROWS_AS(quench_map_from_modes(wg, we, T, Eigen::Vector2d::Zero(), 1.0), IllConditionedMap);
    CHECK_THROWS_AS(quench_map_from_modes(wg, Eigen::Vector2d(0.0, 1.0), T, Eigen::Vector2d::Zero(), 1.0),
                    UnstableStructure);
}
