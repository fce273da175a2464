#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdc/matrix.hpp"
#include "pdc/problem.hpp"

namespace pdc {

/// Autonomous-or-not vector field z' = f(z, t). Evaluators must be pure.
struct VectorField {
    std::size_t dimension = 0;
    std::function<Vec(const Vec&, double)> evaluator;
    std::string label;

    Vec operator()(const Vec& z, double t) const { return evaluator(z, t); }
};

/// One integration run: strictly increasing time grid plus the state at each
/// grid point, tagged with the label of the field that produced it.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::string field_label;

    std::size_t size() const { return times.size(); }
    const Vec& back_state() const { return states.back(); }
};

/// Observer replacing a subset of state coordinates by estimates.
/// observer_field(z_u_hat, z_u, t) gives the estimate dynamics; beta_hat is
/// the declared partial contraction rate of that observer.
struct ObserverConfig {
    std::vector<std::size_t> observed_indices;
    std::vector<std::size_t> unobserved_indices;
    std::function<Vec(const Vec&, const Vec&, double)> observer_field;
    double beta_hat = 0.0;
};

/// First-order lag z_u_hat' = (z_u - z_u_hat)/T on the given coordinates;
/// beta_hat = 1/T, exact for this observer.
ObserverConfig first_order_lag_observer(std::size_t state_dim,
                                        std::vector<std::size_t> unobserved_indices,
                                        double time_constant);

/// The primal-dual flow x' = -grad g - E^T nu, nu' = E x - q(t).
VectorField pd_vector_field(const SaddleProblem& prob);

/// Jacobian of the PD flow: [[-H(x), -E^T], [E, 0]].
DenseMatrix displacement_jacobian(const SaddleProblem& prob, const Vec& x, double t);

/// Classical RK4 with a fixed step; the last step is shortened to land on t1
/// exactly. Aborts with DivergenceError when a state stops being finite or
/// exceeds 1e9 in magnitude.
Trajectory integrate(const VectorField& field, const Vec& z0, double t0, double t1,
                     double step);

/// f(z, t) + d(z, t), labelled "<base>+perturbed".
VectorField perturbed_field(const VectorField& base,
                            std::function<Vec(const Vec&, double)> disturbance);

/// PD flow driven by spliced estimates: the augmented state is (z, z_u_hat);
/// z' = f(z_hat, t) with z_hat substituting observer estimates into the
/// unobserved slots, and z_u_hat' given by the observer.
VectorField observer_augmented_field(const SaddleProblem& prob, const ObserverConfig& obs);

/// Splices estimates into the unobserved slots of z.
Vec splice_estimate(const Vec& z, const std::vector<std::size_t>& unobserved_indices,
                    const Vec& z_u_hat);

/// CSV with header `t,<names...>` and 17 significant digits per value.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_names = {});
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace pdc
