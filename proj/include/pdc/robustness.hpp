#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pdc/contraction.hpp"
#include "pdc/dynamics.hpp"
#include "pdc/matrix.hpp"
#include "pdc/problem.hpp"

namespace pdc {

/// Lipschitz constants for the PD field in the certificate metric:
/// xi bounds the field change under estimate substitution, eta bounds the
/// field magnitude by the distance to the optimum.
struct LipschitzEstimates {
    double xi = 0.0;
    double eta = 0.0;
    enum class Method { AnalyticLinear, Sampled } method = Method::AnalyticLinear;
    std::size_t sample_count = 0;
    Vec xi_maximizer;
    Vec eta_maximizer;
};

/// Outcome of checking one predicted bound against a simulated supremum.
struct BoundReport {
    std::string bound_id;
    std::map<std::string, double> constants;
    double predicted = 0.0;
    double observed_sup = 0.0;
    double transient_cutoff = 0.0;
    bool satisfied = false;
    bool condition_violated = false;
    std::string note;
};

/// ||z_pd - z*|| <= sup||z*'|| / beta.
double bound_tracking(double beta, double sup_rate);

/// ||z - z_pd|| <= (xi / beta) * sup||z_hat - z||.
double bound_approx_to_pd(double beta, double xi, double sup_estimate_error);

/// ||z_hat - z|| <= eta / (beta_hat - xi) * sup||z - z*||. Requires beta_hat > xi.
double bound_observer_error(double eta, double beta_hat, double xi, double sup_tracking);

/// ||z - z*|| <= (beta_hat - xi) / (beta (beta_hat - xi) - eta xi) * sup||z*'||.
/// Requires beta_hat > xi and beta (beta_hat - xi) - eta xi > 0.
double bound_tracking_with_observer(double beta, double beta_hat, double xi, double eta,
                                    double sup_rate);

/// ||z - z_pd|| <= (1/beta) * eta xi / (beta (beta_hat - xi) - eta xi) * sup||z*'||.
double bound_perturbed_to_pd(double beta, double beta_hat, double xi, double eta,
                             double sup_rate);

/// Axis-aligned sampling box for the sampled Lipschitz path.
struct StateBox {
    Vec lower;
    Vec upper;
};

/// Quadratic problems: analytic constants from the constant PD matrix A in
/// Theta coordinates (eta = ||Theta A Theta^-1||_2; xi from the unobserved
/// columns of that matrix). Otherwise: sampled ratio maxima over the box,
/// inflated by 1.1.
LipschitzEstimates estimate_lipschitz(const SaddleProblem& prob,
                                      const ContractionCertificate& cert,
                                      const ObserverConfig& obs, const StateBox& domain,
                                      std::size_t samples, std::uint64_t seed = 12345);

/// Gain bounding the unobserved-coordinate velocity by the Theta-weighted
/// distance to the optimum: ||(A Theta^-1)[unobserved rows, :]||_2 for the
/// linear PD matrix A. This is the forcing constant of the observer error
/// dynamics; the generic eta = ||Theta A Theta^-1||_2 can undershoot it
/// because extracting a coordinate from Theta-weighted displacements mixes
/// components. Quadratic objectives only.
double observer_forcing_gain(const SaddleProblem& prob, const ContractionCertificate& cert,
                             const ObserverConfig& obs);

/// Post-cutoff supremum of a precomputed distance series against a predicted
/// bound. `distances[i]` pairs with `times[i]`.
BoundReport validate_bound(const std::string& bound_id, const std::vector<double>& times,
                           const std::vector<double>& distances, double predicted,
                           double transient_cutoff,
                           std::map<std::string, double> constants = {});

/// Theta-weighted distance series between a trajectory and the instantaneous
/// optimum of `prob` sampled on the trajectory grid. `state_dim` trims
/// augmented states (observer estimates) down to the problem state.
std::vector<double> distance_to_optimum_series(const Trajectory& traj,
                                               const SaddleProblem& prob,
                                               const DenseMatrix& theta);

/// Theta-weighted distance series between two trajectories sharing a grid.
std::vector<double> distance_series(const Trajectory& a, const Trajectory& b,
                                    const DenseMatrix& theta);

/// Max of optimum_rate over a uniform grid of `grid_points` in [t0, t1],
/// measured in the Theta norm.
double sup_optimum_rate(const SaddleProblem& prob, const DenseMatrix& theta, double t0,
                        double t1, std::size_t grid_points = 10000);

std::string bound_report_json(const BoundReport& report);
std::string bound_report_csv_row(const BoundReport& report);

}  // namespace pdc
