#include <cmath>

#include "doctest.h"
#include "pdc/errors.hpp"
#include "pdc/hierarchy.hpp"

using namespace pdc;

namespace {

std::vector<LayerSpec> two_layer_cascade() {
    return make_linear_cascade({LinearLayerParams{1.0, 1.0, 0.2, 0.1},
                                LinearLayerParams{10.0, 0.5, 0.0, 0.0}});
}

}  // namespace

TEST_CASE("tau_chain: single layer is the plain contraction bound") {
    LayerSpec solo;
    solo.dim = 1;
    solo.beta = 2.5;
    const auto chain = tau_chain({solo});
    REQUIRE(chain.size() == 1);
    CHECK(chain[0].gamma == doctest::Approx(1.0));
    CHECK(chain[0].tau == doctest::Approx(1.0 / 2.5));
}

TEST_CASE("tau_chain: two-layer hand computation") {
    // Fast layer: tau_2 = 1/10, rho_2 = 0.5.
    // Slow layer: gamma_1 = 1 - 0.2 * 0.1 * 0.5 = 0.99,
    //             tau_1 = 0.99 / (0.99 * 1 - 0.1) = 1.11236...
    const auto chain = tau_chain(two_layer_cascade());
    REQUIRE(chain.size() == 2);
    CHECK(chain[1].tau == doctest::Approx(0.1));
    CHECK(chain[0].gamma == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(chain[0].tau == doctest::Approx(0.99 / 0.89).epsilon(1e-12));
    CHECK(chain[0].tau == doctest::Approx(1.11236).epsilon(1e-4));
}

TEST_CASE("tau_chain: base_tau override on the fastest layer") {
    auto layers = two_layer_cascade();
    layers[1].base_tau = 0.5;
    const auto chain = tau_chain(layers);
    CHECK(chain[1].tau == doctest::Approx(0.5));
    // gamma_1 = 1 - 0.2 * 0.5 * 0.5 = 0.95; tau_1 = 0.95 / (0.95 - 0.1).
    CHECK(chain[0].gamma == doctest::Approx(0.95));
    CHECK(chain[0].tau == doctest::Approx(0.95 / 0.85));
}

TEST_CASE("tau_chain: gamma <= 0 rejected with the layer index") {
    auto layers = two_layer_cascade();
    layers[0].eta = 200.0;  // 1 - 200 * 0.1 * 0.5 = -9
    try {
        tau_chain(layers);
        FAIL("expected StabilityConditionError");
    } catch (const StabilityConditionError& err) {
        CHECK(err.layer_index == 0);
    }

    // gamma_k beta_k <= xi_k also rejected.
    auto tight = two_layer_cascade();
    tight[0].xi = 1.5;
    CHECK_THROWS_AS(tau_chain(tight), StabilityConditionError);

    CHECK_THROWS_AS(tau_chain({}), ConfigError);
}

TEST_CASE("tau_chain: decoupled stack reduces layer by layer") {
    // eta = 0 everywhere: tau_k = 1/(beta_k - xi_k) independent of the rest.
    auto layers = make_linear_cascade({LinearLayerParams{2.0, 1.0, 0.0, 0.5},
                                       LinearLayerParams{8.0, 1.0, 0.0, 0.0}});
    const auto chain = tau_chain(layers);
    CHECK(chain[0].gamma == doctest::Approx(1.0));
    CHECK(chain[0].tau == doctest::Approx(1.0 / 1.5));
    CHECK(chain[1].tau == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("tau_chain: monotone in the coupling strength") {
    double prev = 0.0;
    for (double eta1 : {0.0, 0.5, 1.0, 2.0}) {
        auto layers = make_linear_cascade({LinearLayerParams{1.0, 1.0, eta1, 0.1},
                                           LinearLayerParams{10.0, 0.5, 0.0, 0.0}});
        const double tau1 = tau_chain(layers)[0].tau;
        CHECK(tau1 >= prev);
        prev = tau1;
    }
}

TEST_CASE("dk_disturbance") {
    const auto layers = two_layer_cascade();
    const Vec z_prev{0.3};
    const Vec z1{0.7};

    SUBCASE("zero when the fast layer sits at its equilibrium") {
        const Vec z2_star = layers[1].equilibrium(z1, 0.0);
        const Vec d = dk_disturbance(layers[0], layers[1], z_prev, z1, z2_star, 0.0);
        CHECK(std::abs(d[0]) < 1e-14);
    }

    SUBCASE("linear in the fast layer's deviation, slope eta") {
        const Vec z2_star = layers[1].equilibrium(z1, 0.0);
        for (double dev : {0.1, -0.4, 2.0}) {
            const Vec d = dk_disturbance(layers[0], layers[1], z_prev, z1,
                                         {z2_star[0] + dev, }, 0.0);
            CHECK(d[0] == doctest::Approx(-0.2 * dev).epsilon(1e-12));
            CHECK(norm2(d) <= layers[0].eta * std::abs(dev) + 1e-12);
        }
    }
}

TEST_CASE("simulate_stack: constant input settles onto the equilibrium chain") {
    const auto layers = two_layer_cascade();
    const VectorSignal input = VectorSignal::constant({0.8});
    const auto run = simulate_stack(layers, input, {{0.0}, {0.0}}, 0.0, 40.0, 1e-3);
    REQUIRE(run.layer_trajectories.size() == 2);
    REQUIRE(run.layer_reports.size() == 2);

    // Steady state: z1 -> 0.8 (z2 converges to 0.5 z1, killing the coupling
    // defect), z2 -> 0.4.
    const double z1_end = run.layer_trajectories[0].back_state()[0];
    const double z2_end = run.layer_trajectories[1].back_state()[0];
    CHECK(z1_end == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(z2_end == doctest::Approx(0.4).epsilon(1e-6));

    // Constant input means the slow layer's reference never moves: its bound
    // is 0 and only the decayed transient remains past the cutoff. The fast
    // layer's reference 0.5 z1(t) moves during the slow transient, so its
    // report is a genuine nonzero bound check.
    CHECK(run.layer_reports[0].bound_id == "layer_tracking");
    CHECK(run.layer_reports[0].predicted == doctest::Approx(0.0).scale(1.0));
    CHECK(run.layer_reports[0].observed_sup < 1e-3);
    CHECK(run.layer_reports[1].satisfied);
    CHECK(run.layer_reports[1].observed_sup <= run.layer_reports[1].predicted);
}

TEST_CASE("simulate_stack: sinusoidal input keeps every layer inside its bound") {
    const auto layers = two_layer_cascade();
    const VectorSignal input{{Signal::sinusoid(1.0, 0.2)}};
    const auto run = simulate_stack(layers, input, {{0.0}, {0.0}}, 0.0, 80.0, 1e-3);
    REQUIRE(run.chain.size() == 2);
    CHECK(run.chain[0].tau == doctest::Approx(0.99 / 0.89).epsilon(1e-12));
    for (const auto& rep : run.layer_reports) {
        CHECK(rep.satisfied);
        CHECK(rep.observed_sup > 0.0);
        CHECK(rep.observed_sup <= rep.predicted);
    }
}

TEST_CASE("simulate_stack: validation") {
    const auto layers = two_layer_cascade();
    const VectorSignal input = VectorSignal::constant({0.0});
    CHECK_THROWS_AS(simulate_stack(layers, input, {{0.0}}, 0.0, 1.0, 1e-3),
                    ConfigError);
    CHECK_THROWS_AS(simulate_stack({}, input, {}, 0.0, 1.0, 1e-3), ConfigError);
}
