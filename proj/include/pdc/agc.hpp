#pragma once

#include <string>

#include "pdc/contraction.hpp"
#include "pdc/dynamics.hpp"
#include "pdc/problem.hpp"
#include "pdc/robustness.hpp"

namespace pdc {

/// Rescaled AGC model on a network of generators: frequency is the primal
/// variable, line powers and the AGC effort are duals, and the turbine delay
/// acts as a first-order-lag observer on the AGC effort.
struct AgcConfig {
    std::size_t n_gen = 1;
    DenseMatrix damping;       ///< D, diagonal PD (per-unit)
    DenseMatrix susceptance;   ///< B, diagonal PD (per-unit, one entry per line)
    DenseMatrix incidence;     ///< E, lines x buses
    Vec gains;                 ///< k, secondary control gains
    double turbine_T = 0.1;    ///< s
    double torque_amplitude = 0.1;  ///< per-unit
    double torque_omega = 0.5;      ///< rad/s

    static AgcConfig smib_default();
};

/// AGC cast as a saddle problem. The stacked constraint matrix
/// [B^{1/2} E; -k^T] is rank-deficient for SMIB-like configs; the problem is
/// then reduced to the minimal full-rank dual set via the row space of the
/// stack, which leaves the frequency flow unchanged. `dual_basis` maps full
/// duals (p_E, u_agc) to reduced duals: nu_red = dual_basis^T * nu_full.
struct AgcProblem {
    SaddleProblem reduced;
    DenseMatrix stacked_e;   ///< full (lines+1) x n constraint stack
    DenseMatrix dual_basis;  ///< (lines+1) x m_red, orthonormal columns
};

AgcProblem build_agc_problem(const AgcConfig& cfg);

/// True AGC flow on (omega, p_E, u_agc) with the sinusoidal torque on omega.
VectorField agc_true_field(const AgcConfig& cfg);

/// Turbine-delayed flow on (omega, p_E, u_agc, u_agc_hat): frequency responds
/// to u_agc_hat; u_agc_hat' = (u_agc - u_agc_hat)/T.
VectorField agc_delayed_field(const AgcConfig& cfg);

/// Maps a full AGC state (optionally with trailing observer entries) to
/// reduced problem coordinates (omega, nu_red).
Vec agc_to_reduced(const AgcProblem& prob, const AgcConfig& cfg, const Vec& z_full);

struct AgcDemoResult {
    Trajectory true_trajectory;
    Trajectory delayed_trajectory;
    BoundReport report;
    ContractionCertificate certificate;
    DenseMatrix stacked_e;
    DenseMatrix reduced_e;
    DenseMatrix dual_basis;
    double beta_hat = 0.0;
    double xi = 0.0;
    double eta = 0.0;
    double sup_rate = 0.0;
    /// One row per grid point: t, Theta-weighted error, Euclidean error, bound.
    std::vector<double> times;
    std::vector<double> error_theta;
    std::vector<double> error_euclid;
};

/// Runs the delayed system against the tracking bound of the observer-aware
/// tracking estimate. Throws ConditionError when the positivity condition
/// fails for the certified/estimated constants.
AgcDemoResult run_agc_demo(const AgcConfig& cfg, double t0, double t1, double step);

/// Writes agc_error.csv (t,error,error_euclid,bound) and agc_report.json
/// under out_dir.
void write_agc_artifacts(const AgcDemoResult& result, const std::string& out_dir);

}  // namespace pdc
