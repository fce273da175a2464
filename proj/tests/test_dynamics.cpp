#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pdc/dynamics.hpp"
#include "pdc/errors.hpp"
#include "pdc/problem.hpp"

using namespace pdc;

namespace {

SaddleProblem scalar_problem(double q0 = 1.0) {
    return make_quadratic_problem(DenseMatrix::identity(1), Vec{0.0},
                                  DenseMatrix::from_rows({{1.0}}),
                                  VectorSignal::constant({q0}));
}

VectorField scalar_decay(double rate) {
    VectorField f;
    f.dimension = 1;
    f.label = "decay";
    f.evaluator = [rate](const Vec& z, double) { return Vec{-rate * z[0]}; };
    return f;
}

}  // namespace

TEST_CASE("pd_vector_field evaluates the PD flow") {
    const auto prob = scalar_problem();
    const auto field = pd_vector_field(prob);
    REQUIRE(field.dimension == 2);

    const Vec at_origin = field({0.0, 0.0}, 0.0);
    CHECK(at_origin[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(at_origin[1] == doctest::Approx(-1.0));

    // The KKT point is an equilibrium.
    const Vec at_opt = field({1.0, -1.0}, 0.0);
    CHECK(std::abs(at_opt[0]) < 1e-14);
    CHECK(std::abs(at_opt[1]) < 1e-14);

    const auto prob2 =
        make_quadratic_problem(DenseMatrix::identity(2), Vec{0.0, 0.0},
                               DenseMatrix::from_rows({{1.0, -1.0}}), VectorSignal::zero(1));
    const Vec dz = pd_vector_field(prob2)({1.0, 0.0, 0.0}, 0.0);
    CHECK(dz[0] == doctest::Approx(-1.0));
    CHECK(dz[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(dz[2] == doctest::Approx(1.0));
}

TEST_CASE("displacement_jacobian") {
    const auto prob = scalar_problem();
    const auto j = displacement_jacobian(prob, {0.0}, 0.0);
    CHECK(j(0, 0) == doctest::Approx(-1.0));
    CHECK(j(0, 1) == doctest::Approx(-1.0));
    CHECK(j(1, 0) == doctest::Approx(1.0));
    CHECK(j(1, 1) == doctest::Approx(0.0).scale(1.0));

    // mu_2 of the scalar PD Jacobian is 0: contracting but not strictly.
    CHECK(matrix_measure_2(j) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("displacement_jacobian matches finite differences of the field") {
    const auto prob =
        make_quadratic_problem(DenseMatrix::from_rows({{2.0, 0.3}, {0.3, 1.0}}),
                               Vec{0.1, -0.2}, DenseMatrix::from_rows({{1.0, -1.0}}),
                               VectorSignal::constant({0.5}));
    const auto field = pd_vector_field(prob);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Vec z(3);
        for (double& v : z) v = unif(rng);
        const auto j = displacement_jacobian(prob, {z[0], z[1]}, 0.0);
        for (std::size_t col = 0; col < 3; ++col) {
            Vec zp = z, zm = z;
            zp[col] += h;
            zm[col] -= h;
            const Vec fp = field(zp, 0.0);
            const Vec fm = field(zm, 0.0);
            for (std::size_t row = 0; row < 3; ++row) {
                const double fd = (fp[row] - fm[row]) / (2.0 * h);
                CHECK(j(row, col) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
            }
        }
    }
}

TEST_CASE("integrate: exponential decay oracle") {
    const auto traj = integrate(scalar_decay(1.0), {1.0}, 0.0, 1.0, 1e-3);
    CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(traj.back_state()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("integrate: zero field keeps the state constant") {
    VectorField f;
    f.dimension = 2;
    f.label = "zero";
    f.evaluator = [](const Vec& z, double) { return Vec(z.size(), 0.0); };
    const auto traj = integrate(f, {0.3, -0.7}, 0.0, 2.0, 0.1);
    for (const auto& z : traj.states) {
        CHECK(z[0] == 0.3);
        CHECK(z[1] == -0.7);
    }
}

TEST_CASE("integrate: scalar PD problem converges to the KKT point") {
    const auto prob = scalar_problem();
    const auto traj = integrate(pd_vector_field(prob), {0.0, 0.0}, 0.0, 50.0, 1e-2);
    const auto zstar = instantaneous_optimum(prob, 50.0).flat();
    CHECK(std::abs(traj.back_state()[0] - zstar[0]) < 1e-6);
    CHECK(std::abs(traj.back_state()[1] - zstar[1]) < 1e-6);
}

TEST_CASE("integrate: fourth-order convergence against the exponential") {
    auto error_at = [](double step) {
        const auto traj = integrate(scalar_decay(1.0), {1.0}, 0.0, 1.0, step);
        return std::abs(traj.back_state()[0] - std::exp(-1.0));
    };
    const double coarse = error_at(0.1);
    const double fine = error_at(0.05);
    CHECK(coarse / fine >= 12.0);
}

TEST_CASE("integrate: validation and divergence") {
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), {1.0}, 1.0, 0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), {1.0}, 0.0, 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(integrate(scalar_decay(1.0), {1.0, 2.0}, 0.0, 1.0, 0.1), DimensionError);

    VectorField blowup;
    blowup.dimension = 1;
    blowup.label = "blowup";
    blowup.evaluator = [](const Vec& z, double) { return Vec{z[0] * z[0]}; };
    CHECK_THROWS_AS(integrate(blowup, {5.0}, 0.0, 10.0, 1e-2), DivergenceError);
}

TEST_CASE("Euclidean non-expansion between PD trajectory pairs") {
    const auto prob = scalar_problem();
    const auto field = pd_vector_field(prob);
    const auto t1 = integrate(field, {0.0, 0.0}, 0.0, 10.0, 1e-2);
    const auto t2 = integrate(field, {2.0, 1.0}, 0.0, 10.0, 1e-2);
    double prev = norm2(vec_sub(t1.states[0], t2.states[0]));
    for (std::size_t i = 1; i < t1.times.size(); ++i) {
        const double d = norm2(vec_sub(t1.states[i], t2.states[i]));
        CHECK(d <= prev + 1e-8);
        prev = d;
    }
}

TEST_CASE("perturbed_field") {
    const auto base = scalar_decay(1.0);
    SUBCASE("zero disturbance is the identity") {
        const auto f = perturbed_field(base, [](const Vec& z, double) {
            return Vec(z.size(), 0.0);
        });
        CHECK(f({0.7}, 0.3)[0] == base({0.7}, 0.3)[0]);
        CHECK(f.label == "decay+perturbed");
    }
    SUBCASE("the tightness system z' = -z + t") {
        const auto f = perturbed_field(base, [](const Vec&, double t) { return Vec{t}; });
        CHECK(f({2.0}, 3.0)[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("observer_augmented_field") {
    const auto prob = scalar_problem();

    SUBCASE("tight lag tracks the true PD flow") {
        const auto obs = first_order_lag_observer(2, {1}, 1e-4);
        const auto aug = observer_augmented_field(prob, obs);
        const auto traj_aug = integrate(aug, {0.0, 0.0, 0.0}, 0.0, 10.0, 5e-5);
        const auto traj_true = integrate(pd_vector_field(prob), {0.0, 0.0}, 0.0, 10.0, 5e-5);
        double sup = 0.0;
        for (std::size_t i = 0; i < traj_true.times.size(); ++i) {
            sup = std::max(sup, std::abs(traj_aug.states[i][0] - traj_true.states[i][0]));
            sup = std::max(sup, std::abs(traj_aug.states[i][1] - traj_true.states[i][1]));
        }
        CHECK(sup < 1e-3);
    }

    SUBCASE("equilibrium with matched estimate is an augmented equilibrium") {
        const auto obs = first_order_lag_observer(2, {1}, 0.5);
        const auto aug = observer_augmented_field(prob, obs);
        const Vec dz = aug({1.0, -1.0, -1.0}, 0.0);
        for (double v : dz) CHECK(std::abs(v) < 1e-14);
    }

    SUBCASE("non-partition index sets rejected") {
        ObserverConfig bad = first_order_lag_observer(2, {1}, 0.5);
        bad.observed_indices = {0, 1};
        CHECK_THROWS_AS(observer_augmented_field(prob, bad), ConfigError);
    }
}

TEST_CASE("trajectory CSV round-trips at 17 significant digits") {
    const auto traj = integrate(scalar_decay(0.37), {1.0 / 3.0}, 0.0, 1.0, 0.125);
    std::stringstream buffer;
    write_trajectory_csv(buffer, traj, {"x"});
    const auto back = read_trajectory_csv(buffer);
    REQUIRE(back.times.size() == traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(back.times[i] == traj.times[i]);
        CHECK(back.states[i][0] == traj.states[i][0]);
    }
}
