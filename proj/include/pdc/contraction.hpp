#pragma once

#include <optional>
#include <utility>

#include "pdc/dynamics.hpp"
#include "pdc/matrix.hpp"
#include "pdc/problem.hpp"

namespace pdc {

/// Explicit contraction certificate for a PD flow: the skew metric Theta, the
/// quadratic form Q governing d/dt ||Theta dz||^2 = -2 dz^T Q dz, and the
/// certified rate beta = lambda_min(Theta^-T Q Theta^-1).
struct ContractionCertificate {
    double alpha = 0.0;
    double alpha_max = 0.0;
    DenseMatrix theta;
    DenseMatrix theta_inverse;
    DenseMatrix q_form;
    double beta = 0.0;
    HessianBounds hessian_bounds_used{0.0, 0.0};
};

/// Upper limit for the metric parameter:
/// 1 / max{ ||E||_2, ||E H^{-1/2}||_2^2 + ||H||_2 / 4 }.
/// Non-quadratic objectives use the conservative surrogates
/// ||H||_2 <- h_max and ||E H^{-1/2}||_2^2 <- ||E||_2^2 / h_min.
double alpha_max(const SaddleProblem& prob);

/// Theta = [[I, alpha E^T], [0, (I - alpha^2 E E^T)^{1/2}]].
DenseMatrix build_theta(const DenseMatrix& e, double alpha);

/// Symmetric Q with blocks [[H - alpha E^T E, (alpha/2) H E^T],
///                          [(alpha/2) E H,   alpha E E^T]].
DenseMatrix build_q(const DenseMatrix& h, const DenseMatrix& e, double alpha);

/// Builds the certificate. When alpha is absent it is chosen by golden-section
/// maximization of beta over (0, 0.999 * alpha_max), 40 iterations.
ContractionCertificate certify(const SaddleProblem& prob,
                               std::optional<double> alpha = std::nullopt);

/// ||Theta (z1 - z2)||_2.
double weighted_distance(const DenseMatrix& theta, const Vec& z1, const Vec& z2);

/// Least-squares slope of -log ||Theta (z1(t) - z2(t))|| over [t_a, t_b]:
/// the realized decay rate of the trajectory pair.
double empirical_rate(const Trajectory& traj1, const Trajectory& traj2,
                      const DenseMatrix& theta, std::pair<double, double> window);

}  // namespace pdc
