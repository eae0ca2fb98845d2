#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ionquench/crystal.hpp"
#include "ionquench/errors.hpp"

using namespace ionquench;

namespace {

Eigen::VectorXd random_configuration(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    Eigen::VectorXd r(2 * n);
    for (int i = 0; i < n; ++i) {
        r[i] = 1.3 * (i - 0.5 * (n - 1)) + jitter(rng);
        r[n + i] = jitter(rng);
    }
    return r;
}

Eigen::VectorXd numeric_gradient(const Eigen::VectorXd& r, const CrystalModel& m, InternalState s) {
    const double h = 1e-6;
    Eigen::VectorXd g(r.size());
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        Eigen::VectorXd a = r, b = r;
        a[k] += h;
        b[k] -= h;
        g[k] = (potential_energy(a, m, s) - potential_energy(b, m, s)) / (2.0 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("two-ion energy at force balance") {
    const double d = std::cbrt(0.25);
    Eigen::VectorXd r(4);
    r << -d, d, 0.0, 0.0;
    const CrystalModel m{2, 3.0, 0.0};
    CHECK(potential_energy(r, m, InternalState::ground) == doctest::Approx(3.0 * std::pow(0.25, 2.0 / 3.0)));
    CHECK(potential_gradient(r, m, InternalState::ground).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("excited state adds the dipole term on the central ion only") {
    std::mt19937 rng(7);
    const CrystalModel m{5, 7.0, 0.4};
    const Eigen::VectorXd r = random_configuration(5, rng);
    const double diff = potential_energy(r, m, InternalState::excited) - potential_energy(r, m, InternalState::ground);
    CHECK(diff == doctest::Approx(0.5 * 0.4 * r[5 + 2] * r[5 + 2]).epsilon(1e-12));
}

TEST_CASE("coincident ions are singular") {
    Eigen::VectorXd r(6);
    r << -1.0, 0.5, 0.5, 0.0, 0.2, 0.2;
    const CrystalModel m{3, 3.0, 0.0};
    CHECK_THROWS_AS(potential_energy(r, m, InternalState::ground), SingularConfiguration);
    CHECK_THROWS_AS(potential_gradient(r, m, InternalState::ground), SingularConfiguration);
    CHECK_THROWS_AS(potential_hessian(r, m, InternalState::ground), SingularConfiguration);
}

TEST_CASE("analytic derivatives match finite differences") {
    std::mt19937 rng(11);
    for (int n : {3, 5, 7}) {
        const CrystalModel m{n, 2.0 + n, 0.3};
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::VectorXd r = random_configuration(n, rng);
            for (InternalState s : {InternalState::ground, InternalState::excited}) {
                const Eigen::VectorXd g = potential_gradient(r, m, s);
                const Eigen::VectorXd fd = numeric_gradient(r, m, s);
                CHECK((g - fd).norm() <= 1e-8 * std::max(1.0, g.norm()));

                const Eigen::MatrixXd h = potential_hessian(r, m, s);
                CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
                Eigen::MatrixXd fh(2 * n, 2 * n);
                const double step = 1e-6;
                for (int k = 0; k < 2 * n; ++k) {
                    Eigen::VectorXd a = r, b = r;
                    a[k] += step;
                    b[k] -= step;
                    fh.col(k) = (potential_gradient(a, m, s) - potential_gradient(b, m, s)) / (2.0 * step);
                }
                CHECK((h - fh).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, h.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("transverse restoring force of the three-ion chain") {
    const double a = std::cbrt(1.25);
    const double alpha = 3.1;
    const CrystalModel m{3, alpha, 0.0};
    const double eps = 1e-5;
    // Along the zigzag shape (1, -2, 1) the stiffness is alpha - 12/5; a lone
    // central-ion displacement sees the diagonal entry alpha - 8/5 instead.
    Eigen::VectorXd r(6);
    r << -a, 0.0, a, eps, -2.0 * eps, eps;
    Eigen::VectorXd g = potential_gradient(r, m, InternalState::ground);
    CHECK(g[4] == doctest::Approx(-2.0 * (alpha - 2.4) * eps).epsilon(1e-8));
    CHECK(g[3] == doctest::Approx((alpha - 2.4) * eps).epsilon(1e-8));

    r << -a, 0.0, a, 0.0, eps, 0.0;
    g = potential_gradient(r, m, InternalState::ground);
    CHECK(g[4] == doctest::Approx((alpha - 1.6) * eps).epsilon(1e-8));
}

TEST_CASE("three-ion linear equilibrium") {
    const CrystalModel m{3, 2.9, 0.0};
    const EquilibriumConfiguration c = find_equilibrium(m, InternalState::ground);
    const double a = std::cbrt(1.25);
    CHECK(c.structure == Structure::linear);
    CHECK(c.x()[0] == doctest::Approx(-a).epsilon(1e-12));
    CHECK(std::abs(c.x()[1]) < 1e-12);
    CHECK(c.x()[2] == doctest::Approx(a).epsilon(1e-12));
    CHECK(c.y().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a == doctest::Approx(1.0772).epsilon(1e-4));
}

TEST_CASE("zigzag just below the critical aspect ratio") {
    const CrystalModel m{3, 2.4 - 0.01, 0.0};
    const EquilibriumConfiguration c = find_equilibrium(m, InternalState::ground);
    CHECK(c.structure == Structure::zigzag);
    CHECK(c.y()[1] > 0.0);
    CHECK(c.y().cwiseAbs().maxCoeff() < 0.2);
    CHECK(potential_gradient(c.positions, m, InternalState::ground).lpNorm<Eigen::Infinity>() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(potential_hessian(c.positions, m, InternalState::ground));
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("equilibria are reflection symmetric") {
    for (int n : {3, 5, 7}) {
        const CrystalModel m = crystal_model_at(n, -0.05, 0.025);
        for (InternalState s : {InternalState::ground, InternalState::excited}) {
            const EquilibriumConfiguration c = find_equilibrium(m, s);
            for (int i = 0; i < n; ++i) {
                CHECK(c.x()[i] == doctest::Approx(-c.x()[n - 1 - i]).epsilon(1e-9));
                CHECK(std::abs(std::abs(c.y()[i]) - std::abs(c.y()[n - 1 - i])) < 1e-9);
            }
        }
    }
}

TEST_CASE("seeded search at an equilibrium is a fixed point") {
    const CrystalModel m = crystal_model_at(5, -0.04, 0.0);
    const EquilibriumConfiguration c = find_equilibrium(m, InternalState::ground);
    const EquilibriumConfiguration again = find_equilibrium(m, InternalState::ground, c.positions);
    CHECK((again.positions - c.positions).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("seed sign does not matter beyond the global reflection") {
    const CrystalModel m = crystal_model_at(5, -0.06, 0.0);
    const EquilibriumConfiguration ref = find_equilibrium(m, InternalState::ground);
    Eigen::VectorXd seed = ref.positions;
    seed.tail(5) *= -1.0;
    seed.tail(5).array() += 0.01;
    const EquilibriumConfiguration c = find_equilibrium(m, InternalState::ground, seed);
    CHECK((c.positions - ref.positions).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("structure classification deadband") {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(6);
    r.head(3) << -1.0, 0.0, 1.0;
    CHECK(classify_structure(r) == Structure::linear);
    r[4] = 0.3;
    CHECK(classify_structure(r) == Structure::zigzag);
    r[4] = 1e-7;
    CHECK(classify_structure(r) == Structure::linear);
}

TEST_CASE("energy is invariant under relabeling and reflection") {
    std::mt19937 rng(3);
    const CrystalModel m{5, 6.0, 0.0};
    const Eigen::VectorXd r = random_configuration(5, rng);
    Eigen::VectorXd swapped = r;
    std::swap(swapped[0], swapped[3]);
    std::swap(swapped[5], swapped[8]);
    const double e = potential_energy(r, m, InternalState::ground);
    CHECK(potential_energy(swapped, m, InternalState::ground) == doctest::Approx(e).epsilon(1e-14));
    CHECK(potential_energy(-r, m, InternalState::ground) == doctest::Approx(e).epsilon(1e-14));
}

TEST_CASE("critical aspect ratios") {
    CHECK(critical_aspect_ratio(3) == doctest::Approx(2.4).epsilon(1e-10));
    CHECK(critical_aspect_ratio(2) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::sqrt(critical_aspect_ratio(3)) == doctest::Approx(1.549).epsilon(1e-3));

    // Scan oracle for N = 5: the smallest transverse eigenvalue changes sign once.
    const double alpha_c5 = critical_aspect_ratio(5);
    CHECK(alpha_c5 > 2.4);
    double crossing = 0.0;
    double previous = linear_transverse_min_eigenvalue({5, 2.0, 0.0}, InternalState::ground);
    for (double alpha = 2.0; alpha <= 10.0; alpha += 1e-3) {
        const double now = linear_transverse_min_eigenvalue({5, alpha, 0.0}, InternalState::ground);
        if (previous < 0.0 && now >= 0.0) {
            crossing = alpha;
            break;
        }
        previous = now;
    }
    CHECK(std::abs(crossing - alpha_c5) <= 1e-3);
}

TEST_CASE("phase boundary") {
    CHECK(phase_boundary(3, 0.025) == doctest::Approx(-0.0165).epsilon(0.01));
    CHECK(std::abs(phase_boundary(3, 0.0)) < 1e-6);
    const double g5 = phase_boundary(3, 0.005);
    CHECK(g5 < 0.0);
    CHECK(g5 > -0.0165);
    double previous = 0.0;
    for (double delta = 0.005; delta <= 0.05; delta += 0.005) {
        const double gc = phase_boundary(3, delta);
        CHECK(gc < previous);
        previous = gc;
    }
}

TEST_CASE("ground-state structure follows the sign of g") {
    for (int n : {3, 5}) {
        for (double g : {-0.05, -0.01, -2e-4, 2e-4, 0.01, 0.05}) {
            const PhasePoint p = phase_point(n, g, 0.02);
            CHECK(p.structure_g == (g > 0.0 ? Structure::linear : Structure::zigzag));
        }
    }
    const double gc = phase_boundary(3, 0.025);
    CHECK(phase_point(3, gc + 1e-3, 0.025).structure_e == Structure::linear);
    CHECK(phase_point(3, gc - 1e-3, 0.025).structure_e == Structure::zigzag);
}

TEST_CASE("zigzag amplitude grows like sqrt(-g)") {
    std::vector<double> lx, ly;
    for (double g = -0.02; g <= -0.001 + 1e-12; g += 0.001) {
        const EquilibriumConfiguration c = find_equilibrium(crystal_model_at(3, g, 0.0), InternalState::ground);
        lx.push_back(std::log(-g));
        ly.push_back(std::log(c.y().cwiseAbs().maxCoeff()));
    }
    const Eigen::Map<Eigen::VectorXd> x(lx.data(), static_cast<Eigen::Index>(lx.size()));
    const Eigen::Map<Eigen::VectorXd> y(ly.data(), static_cast<Eigen::Index>(ly.size()));
    const double mx = x.mean(), my = y.mean();
    const double slope = ((x.array() - mx) * (y.array() - my)).sum() / (x.array() - mx).square().sum();
    CHECK(slope >= 0.45);
    CHECK(slope <= 0.55);
}

TEST_CASE("excited state needs a central ion") {
    CHECK_THROWS_AS(central_ion(4), InvalidInput);
    CHECK(central_ion(5) == 2);
}
