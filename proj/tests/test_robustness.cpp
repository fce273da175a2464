#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "pdc/contraction.hpp"
#include "pdc/dynamics.hpp"
#include "pdc/errors.hpp"
#include "pdc/problem.hpp"
#include "pdc/robustness.hpp"

using namespace pdc;

namespace {

SaddleProblem scalar_problem(VectorSignal q = VectorSignal::constant({1.0})) {
    return make_quadratic_problem(DenseMatrix::identity(1), Vec{0.0},
                                  DenseMatrix::from_rows({{1.0}}), std::move(q));
}

}  // namespace

TEST_CASE("bound hand values") {
    CHECK(bound_tracking(0.5, 0.2) == doctest::Approx(0.4));
    CHECK(bound_approx_to_pd(2.0, 0.3, 1.0) == doctest::Approx(0.15));
    CHECK(bound_observer_error(1.0, 5.0, 1.0, 1.0) == doctest::Approx(0.25));
    // beta=1, beta_hat=5, xi=1, eta=2: (5-1)/(1*4 - 2) * 0.5 = 1.
    CHECK(bound_tracking_with_observer(1.0, 5.0, 1.0, 2.0, 0.5) == doctest::Approx(1.0));
    // (1/1) * 2/(4-2) * 0.5 = 0.5.
    CHECK(bound_perturbed_to_pd(1.0, 5.0, 1.0, 2.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("bound precondition failures") {
    CHECK_THROWS_AS(bound_tracking(0.0, 1.0), ConditionError);
    CHECK_THROWS_AS(bound_approx_to_pd(-1.0, 0.5, 1.0), ConditionError);
    CHECK_THROWS_AS(bound_observer_error(1.0, 1.0, 1.0, 1.0), ConditionError);
    CHECK_THROWS_AS(bound_observer_error(1.0, 0.5, 1.0, 1.0), ConditionError);
    // beta (beta_hat - xi) = eta xi exactly: 1 * 2 = 2 * 1.
    CHECK_THROWS_AS(bound_tracking_with_observer(1.0, 3.0, 1.0, 2.0, 1.0), ConditionError);
    CHECK_THROWS_AS(bound_perturbed_to_pd(1.0, 3.0, 1.0, 2.0, 1.0), ConditionError);
}

TEST_CASE("fast observer limit recovers the nominal tracking bound") {
    const double nominal = bound_tracking(1.0, 0.5);
    const double with_obs = bound_tracking_with_observer(1.0, 1e9, 1.0, 2.0, 0.5);
    CHECK(with_obs == doctest::Approx(nominal).epsilon(1e-6));
    CHECK(bound_perturbed_to_pd(1.0, 1e9, 1.0, 2.0, 0.5) < 1e-6);
}

TEST_CASE("bound monotonicity") {
    // Worse observer (smaller beta_hat) never shrinks the tracking bound.
    double prev = 0.0;
    for (double bh : {100.0, 20.0, 10.0, 5.0}) {
        const double b = bound_tracking_with_observer(1.0, bh, 1.0, 2.0, 0.5);
        CHECK(b >= prev);
        prev = b;
    }
    // Larger coupling eta never shrinks it either.
    prev = 0.0;
    for (double eta : {0.5, 1.0, 2.0, 3.0}) {
        const double b = bound_tracking_with_observer(1.0, 5.0, 1.0, eta, 0.5);
        CHECK(b >= prev);
        prev = b;
    }
}

TEST_CASE("estimate_lipschitz: analytic constants for linear PD fields") {
    // A = [[-1,-1],[1,0]] with Theta = I: eta = ||A||_2 = golden ratio.
    const auto prob = scalar_problem();
    ContractionCertificate cert;
    cert.alpha = 0.0;
    cert.alpha_max = 0.8;
    cert.theta = DenseMatrix::identity(2);
    cert.theta_inverse = DenseMatrix::identity(2);
    cert.q_form = DenseMatrix::identity(2);
    cert.beta = 1.0;
    const auto obs = first_order_lag_observer(2, {1}, 0.05);
    StateBox box{{-1.0, -1.0}, {1.0, 1.0}};

    const auto est = estimate_lipschitz(prob, cert, obs, box, 0);
    CHECK(est.method == LipschitzEstimates::Method::AnalyticLinear);
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(est.eta == doctest::Approx(phi).epsilon(1e-10));
    // xi: norm of the unobserved column (-1, 0) of A.
    CHECK(est.xi == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(est.xi <= est.eta);
}

TEST_CASE("estimate_lipschitz: nothing unobserved gives xi = 0") {
    const auto prob = scalar_problem();
    const auto cert = certify(prob, 0.4);
    ObserverConfig obs;
    obs.observed_indices = {0, 1};
    obs.unobserved_indices = {};
    obs.beta_hat = 1e9;
    StateBox box{{-1.0, -1.0}, {1.0, 1.0}};
    const auto est = estimate_lipschitz(prob, cert, obs, box, 0);
    CHECK(est.xi == doctest::Approx(0.0).scale(1.0));
    CHECK(est.eta > 0.0);
}

TEST_CASE("estimate_lipschitz: sampled path brackets the analytic constants") {
    const auto prob = scalar_problem();
    const auto cert = certify(prob, 0.4);
    const auto obs = first_order_lag_observer(2, {1}, 0.05);
    StateBox box{{-2.0, -2.0}, {2.0, 2.0}};

    const auto exact = estimate_lipschitz(prob, cert, obs, box, 0);

    // Force the sampled path via a callable objective with the same quadratic.
    auto g = ObjectiveModel::callable(
        [](const Vec& x) { return 0.5 * x[0] * x[0]; },
        [](const Vec& x) { return Vec{x[0]}; },
        [](const Vec&) { return DenseMatrix::identity(1); });
    SaddleProblem same(std::move(g), DenseMatrix::from_rows({{1.0}}),
                       VectorSignal::constant({1.0}), HessianBounds{1.0, 1.0});
    const auto sampled = estimate_lipschitz(same, cert, obs, box, 4000, 99);
    CHECK(sampled.method == LipschitzEstimates::Method::Sampled);
    CHECK(sampled.sample_count == 4000);
    // Sampled ratios are inflated by 1.1 and measure displacements slightly
    // differently from the column restriction, so allow a generous bracket.
    CHECK(sampled.eta >= exact.eta * 0.95);
    CHECK(sampled.eta <= exact.eta * 1.35);
    CHECK(sampled.xi >= exact.xi * 0.95);
    CHECK(sampled.xi <= exact.xi * 1.35);

    // Determinism: same seed, same answer.
    const auto again = estimate_lipschitz(same, cert, obs, box, 4000, 99);
    CHECK(again.eta == sampled.eta);
    CHECK(again.xi == sampled.xi);
}

TEST_CASE("validate_bound accepts true bounds and rejects falsified ones") {
    const std::vector<double> times = {0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> dists = {5.0, 0.4, 0.3, 0.35, 0.2};

    auto ok = validate_bound("demo", times, dists, 0.4, 0.5, {{"beta", 1.0}});
    CHECK(ok.satisfied);
    CHECK(ok.observed_sup == doctest::Approx(0.4));
    CHECK(ok.predicted == doctest::Approx(0.4));
    CHECK(ok.constants.at("beta") == 1.0);

    auto bad = validate_bound("demo", times, dists, 0.2, 0.5);
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.observed_sup == doctest::Approx(0.4));

    // A cutoff past the last sample leaves nothing to check.
    CHECK_THROWS_AS(validate_bound("demo", times, dists, 0.4, 10.0), WindowError);
}

TEST_CASE("bound_report_json is parseable and complete") {
    BoundReport r;
    r.bound_id = "tracking";
    r.constants = {{"beta", 0.5}, {"sup_rate", 0.2}};
    r.predicted = 0.4;
    r.observed_sup = 0.39;
    r.transient_cutoff = 2.0;
    r.satisfied = true;
    const auto parsed = nlohmann::json::parse(bound_report_json(r));
    CHECK(parsed["bound_id"] == "tracking");
    CHECK(parsed["predicted"].get<double>() == doctest::Approx(0.4));
    CHECK(parsed["constants"]["beta"].get<double>() == doctest::Approx(0.5));
    CHECK(parsed["satisfied"].get<bool>());

    const auto row = bound_report_csv_row(r);
    CHECK(row.find("tracking") != std::string::npos);
}

TEST_CASE("tracking bound holds on a sinusoidally forced scalar problem") {
    auto prob = scalar_problem(VectorSignal({Signal::sinusoid(0.2, 0.5, 0.0)}));
    const auto cert = certify(prob);
    const auto field = pd_vector_field(prob);
    const auto z0 = instantaneous_optimum(prob, 0.0).flat();
    const auto traj = integrate(field, z0, 0.0, 60.0, 1e-3);
    const auto dists = distance_to_optimum_series(traj, prob, cert.theta);
    const double sup_rate = sup_optimum_rate(prob, cert.theta, 0.0, 60.0);
    const double predicted = bound_tracking(cert.beta, sup_rate);
    const auto report = validate_bound("tracking", traj.times, dists, predicted,
                                       8.0 / cert.beta);
    CHECK(report.satisfied);
    CHECK(report.observed_sup > 0.0);
    CHECK(report.observed_sup <= predicted);
}

TEST_CASE("distance series obey the contraction differential inequality") {
    // d/dt ||Theta (z - z*)|| <= -beta ||Theta (z - z*)|| + sup||Theta z*'||,
    // checked discretely with integration-error slack.
    auto prob = scalar_problem(VectorSignal({Signal::sinusoid(0.3, 1.0, 0.0)}));
    const auto cert = certify(prob);
    const auto field = pd_vector_field(prob);
    const double step = 1e-3;
    const auto traj = integrate(field, {1.0, 1.0}, 0.0, 10.0, step);
    const auto dists = distance_to_optimum_series(traj, prob, cert.theta);
    const double sup_rate = sup_optimum_rate(prob, cert.theta, 0.0, 10.0);
    for (std::size_t i = 1; i < dists.size(); ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        const double slope = (dists[i] - dists[i - 1]) / dt;
        CHECK(slope <= -cert.beta * dists[i - 1] + sup_rate + 1e-3);
    }
}
