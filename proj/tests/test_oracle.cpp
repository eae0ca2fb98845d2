#include <doctest.h>

#include <cmath>

#include "ionquench/errors.hpp"
#include "ionquench/oracle.hpp"
#include "ionquench/visibility.hpp"

using namespace ionquench;

namespace {

FockInstance one_mode(double wg, double we, double D) {
    FockInstance inst;
    inst.n_modes = 1;
    inst.omega_g = Eigen::VectorXd::Constant(1, wg);
    inst.omega_e = Eigen::VectorXd::Constant(1, we);
    inst.T_rot = Eigen::MatrixXd::Identity(1, 1);
    inst.displacement = Eigen::VectorXd::Constant(1, D);
    inst.cutoff = recommended_cutoff(inst);
    return inst;
}

FockInstance two_mode() {
    FockInstance inst;
    inst.n_modes = 2;
    inst.omega_g = Eigen::Vector2d(1.0, 1.5);
    inst.omega_e = Eigen::Vector2d(1.2, 1.9);
    inst.T_rot = rotation(0.3);
    inst.displacement = Eigen::Vector2d(0.5, 0.0);
    inst.cutoff = recommended_cutoff(inst);
    return inst;
}

}  // namespace

TEST_CASE("identity instance") {
    const FockOracle oracle(one_mode(1.3, 1.3, 0.0));
    for (double t : {0.0, 0.4, 7.0})
        CHECK(std::abs(oracle.overlap(t) - 1.0) < 1e-12);
    CHECK(std::abs(oracle.energy_variance()) < 1e-12);
}

TEST_CASE("single-mode frequency quench") {
    const FockOracle oracle(one_mode(1.0, 2.0, 0.0));
    CHECK(std::abs(oracle.overlap(constants::pi / 4.0)) == doctest::Approx(0.894427191).epsilon(1e-9));
    CHECK(oracle.energy_variance() == doctest::Approx(9.0 / 8.0).epsilon(1e-9));
}

TEST_CASE("two-mode instance agrees with the closed form") {
    const FockInstance inst = two_mode();
    const FockOracle oracle(inst);
    const QuenchMap q = quench_map_for(inst);
    for (double t = 0.0; t <= 30.0; t += 0.5) {
        const Complex a = oracle.overlap(t);
        CHECK(std::abs(a - overlap_at(q, t)) < 1e-6);
        CHECK(std::abs(a) <= 1.0 + 1e-12);
    }
    CHECK(oracle.energy_variance() == doctest::Approx(-curvature(q)).epsilon(1e-6));
}

TEST_CASE("truncation error shrinks with the cutoff") {
    const FockInstance inst = two_mode();
    const QuenchMap q = quench_map_for(inst);
    const double t = 3.7;
    double previous = 1.0;
    for (int c : {6, 10, 16, 24}) {
        const double err = std::abs(fock_ground_state(inst, c).overlap(t) - overlap_at(q, t));
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-6);
}

TEST_CASE("an under-resolved instance is rejected") {
    FockInstance inst = one_mode(1.0, 1.0, 0.0);
    inst.displacement[0] = 12.0;
    inst.cutoff = min_fock_cutoff;
    CHECK_THROWS_AS(FockOracle(inst).overlap(1.0), CutoffError);
}

TEST_CASE("instance validation") {
    FockInstance inst = two_mode();
    inst.cutoff = 1;
    CHECK_THROWS_AS(FockOracle{inst}, InvalidInput);
    inst = two_mode();
    inst.n_modes = 3;
    CHECK_THROWS_AS(FockOracle{inst}, InvalidInput);
    inst = two_mode();
    inst.T_rot(0, 0) = 2.0;
    CHECK_THROWS_AS(FockOracle{inst}, InvalidInput);
    inst = two_mode();
    inst.omega_e[1] = -1.0;
    CHECK_THROWS_AS(FockOracle{inst}, InvalidInput);
}

TEST_CASE("cutoff recommendation stays in range") {
    CHECK(recommended_cutoff(one_mode(1.0, 1.0, 0.0)) >= min_fock_cutoff);
    CHECK(recommended_cutoff(two_mode()) == 31);
    CHECK(recommended_cutoff(one_mode(0.1, 5.0, 4.0)) <= max_fock_cutoff);
}
