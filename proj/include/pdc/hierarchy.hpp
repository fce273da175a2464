#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pdc/dynamics.hpp"
#include "pdc/robustness.hpp"
#include "pdc/signal.hpp"

namespace pdc {

/// One layer of a multi-time-scale stack, index 0 = slowest. The field sees
/// the neighbouring layers only: f_k(z_{k-1}, z_k, z_{k+1}, t). For the
/// slowest layer z_{k-1} is the exogenous input; for the fastest layer the
/// z_{k+1} argument is empty.
struct LayerSpec {
    std::size_t dim = 1;
    std::function<Vec(const Vec& z_prev, const Vec& z_k, const Vec& z_next, double t)> field;
    /// Instant equilibrium z_k*(z_{k-1}, t) of the layer's designed dynamics.
    std::function<Vec(const Vec& z_prev, double t)> equilibrium;
    double beta = 0.0;   ///< contraction rate of the designed layer dynamics
    double eta = 0.0;    ///< Lipschitz constant of f_k w.r.t. z_{k+1}
    double xi = 0.0;     ///< Lipschitz constant of the designed field w.r.t. z_k
    double rho = 0.0;    ///< Lipschitz constant of z_k* w.r.t. z_{k-1}
    /// Overrides the recursion base 1/beta on the fastest layer, e.g. with the
    /// observer-aware tracking bound.
    std::optional<double> base_tau;
};

struct TauChainEntry {
    double gamma;
    double tau;
};

/// Recursive performance constants of the stack, fastest layer first in the
/// evaluation order but returned in layer order (slowest first):
/// gamma_k = 1 - eta_k tau_{k+1} rho_{k+1}, tau_k = gamma_k/(gamma_k beta_k - xi_k).
/// Throws StabilityConditionError naming the offending layer when gamma_k <= 0
/// or gamma_k beta_k <= xi_k.
std::vector<TauChainEntry> tau_chain(const std::vector<LayerSpec>& layers);

/// d_k = f_k(z_{k-1}, z_k, z*_{k+1}(z_k, t), t) - f_k(z_{k-1}, z_k, z_{k+1}, t):
/// the defect from assuming the faster layer equilibrated.
Vec dk_disturbance(const LayerSpec& layer, const LayerSpec& next_layer, const Vec& z_prev,
                   const Vec& z_k, const Vec& z_next, double t);

struct StackRun {
    std::vector<Trajectory> layer_trajectories;
    std::vector<BoundReport> layer_reports;
    std::vector<TauChainEntry> chain;
};

/// Integrates the designed stacked dynamics (each layer replacing the faster
/// layer's state by its equilibrium map) and checks each layer's tracking
/// error against tau_k * sup||z_k*'|| with the rate measured by finite
/// differences of the equilibrium maps along the run.
StackRun simulate_stack(const std::vector<LayerSpec>& layers, const VectorSignal& input,
                        const std::vector<Vec>& initial_states, double t0, double t1,
                        double step);

/// Scalar linear cascade layer: f_k = -rate (z_k - coupling_prev z_{k-1})
///                                    + coupling_next (z_{k+1} - next_equilibrium).
struct LinearLayerParams {
    double rate = 1.0;           ///< beta_k
    double coupling_prev = 1.0;  ///< rho_k: z_k* = coupling_prev * z_{k-1}
    double coupling_next = 0.0;  ///< eta_k: sensitivity to the faster layer's defect
    double declared_xi = 0.0;
};

/// Builds a scalar linear cascade with the given per-layer constants.
std::vector<LayerSpec> make_linear_cascade(const std::vector<LinearLayerParams>& params);

}  // namespace pdc
