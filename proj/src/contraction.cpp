#include "pdc/contraction.hpp"

#include <algorithm>
#include <cmath>

#include "pdc/errors.hpp"

namespace pdc {

namespace {

DenseMatrix dual_gram_complement(const DenseMatrix& e, double alpha) {
    const std::size_t m = e.rows();
    const DenseMatrix eet = e * transpose(e);
    DenseMatrix s = DenseMatrix::identity(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) s(i, j) -= alpha * alpha * eet(i, j);
    return s;
}

/// Theta and its inverse from the block-triangular structure:
/// Theta^-1 = [[I, -alpha E^T S^-1], [0, S^-1]] with S the PSD square root
/// of I - alpha^2 E E^T.
std::pair<DenseMatrix, DenseMatrix> theta_and_inverse(const DenseMatrix& e, double alpha) {
    const std::size_t n = e.cols();
    const std::size_t m = e.rows();
    const DenseMatrix comp = dual_gram_complement(e, alpha);
    const auto eig = sym_eig(comp);
    if (eig.values.front() <= 1e-12)
        throw MetricError("build_theta: alpha not below 1/||E||, metric degenerate");

    DenseMatrix s(m, m);
    DenseMatrix s_inv(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double a = 0.0;
            double b = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double sq = std::sqrt(eig.values[k]);
                const double w = eig.vectors(i, k) * eig.vectors(j, k);
                a += w * sq;
                b += w / sq;
            }
            s(i, j) = a;
            s_inv(i, j) = b;
        }

    DenseMatrix theta(n + m, n + m);
    DenseMatrix theta_inv(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i) {
        theta(i, i) = 1.0;
        theta_inv(i, i) = 1.0;
    }
    const DenseMatrix et = transpose(e);
    const DenseMatrix et_sinv = et * s_inv;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            theta(i, n + j) = alpha * et(i, j);
            theta_inv(i, n + j) = -alpha * et_sinv(i, j);
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            theta(n + i, n + j) = s(i, j);
            theta_inv(n + i, n + j) = s_inv(i, j);
        }
    return {theta, theta_inv};
}

double rate_for(const DenseMatrix& q, const DenseMatrix& theta_inv) {
    const DenseMatrix mid = transpose(theta_inv) * q * theta_inv;
    return sym_eig_extremes(mid).first;
}

}  // namespace

double alpha_max(const SaddleProblem& prob) {
    const DenseMatrix& e = prob.constraint_matrix();
    const double e_norm = spectral_norm(e);
    double eh_term;
    double h_norm;
    if (prob.objective().is_quadratic()) {
        const DenseMatrix& p = prob.objective().quadratic_p();
        h_norm = spectral_norm(p);
        // E H^{-1/2} via the symmetric square root of P^{-1}.
        const DenseMatrix h_inv_sqrt = sym_sqrt(inverse(p));
        const double s = spectral_norm(e * h_inv_sqrt);
        eh_term = s * s;
    } else {
        const HessianBounds b = prob.hessian_bounds();
        h_norm = b.h_max;
        eh_term = e_norm * e_norm / b.h_min;
    }
    return 1.0 / std::max(e_norm, eh_term + h_norm / 4.0);
}

DenseMatrix build_theta(const DenseMatrix& e, double alpha) {
    if (!(alpha > 0.0) || alpha >= 1.0 / spectral_norm(e))
        throw MetricError("build_theta: alpha must lie in (0, 1/||E||)");
    return theta_and_inverse(e, alpha).first;
}

DenseMatrix build_q(const DenseMatrix& h, const DenseMatrix& e, double alpha) {
    if (h.rows() != h.cols() || h.rows() != e.cols())
        throw DimensionError("build_q: H and E dimensions do not match");
    const std::size_t n = e.cols();
    const std::size_t m = e.rows();
    const DenseMatrix ete = transpose(e) * e;
    const DenseMatrix eet = e * transpose(e);
    const DenseMatrix eh = e * h;

    DenseMatrix q(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = h(i, j) - alpha * ete(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            q(n + i, j) = 0.5 * alpha * eh(i, j);
            q(j, n + i) = 0.5 * alpha * eh(i, j);
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) q(n + i, n + j) = alpha * eet(i, j);
    return q;
}

namespace {

/// Certified rate at a fixed alpha: lambda_min(Theta^-T Q Theta^-1), taking
/// the worst case over the Hessian bound corners for callable objectives.
double beta_at(const SaddleProblem& prob, double alpha, DenseMatrix* theta_out,
               DenseMatrix* theta_inv_out, DenseMatrix* q_out) {
    const DenseMatrix& e = prob.constraint_matrix();
    auto [theta, theta_inv] = theta_and_inverse(e, alpha);

    double beta;
    DenseMatrix q;
    if (prob.objective().is_quadratic()) {
        q = build_q(prob.objective().quadratic_p(), e, alpha);
        beta = rate_for(q, theta_inv);
    } else {
        const HessianBounds b = prob.hessian_bounds();
        const DenseMatrix q_lo = build_q(b.h_min * DenseMatrix::identity(e.cols()), e, alpha);
        const DenseMatrix q_hi = build_q(b.h_max * DenseMatrix::identity(e.cols()), e, alpha);
        const double beta_lo = rate_for(q_lo, theta_inv);
        const double beta_hi = rate_for(q_hi, theta_inv);
        if (beta_lo <= beta_hi) {
            beta = beta_lo;
            q = q_lo;
        } else {
            beta = beta_hi;
            q = q_hi;
        }
    }
    if (theta_out) *theta_out = std::move(theta);
    if (theta_inv_out) *theta_inv_out = std::move(theta_inv);
    if (q_out) *q_out = std::move(q);
    return beta;
}

}  // namespace

ContractionCertificate certify(const SaddleProblem& prob, std::optional<double> alpha) {
    const double amax = alpha_max(prob);

    double chosen;
    if (alpha) {
        if (!(*alpha > 0.0) || !(*alpha < amax))
            throw MetricError("certify: alpha outside (0, alpha_max)");
        chosen = *alpha;
    } else {
        // Golden-section maximization of beta(alpha) on (0, 0.999 * alpha_max).
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = 1e-6 * amax;
        double hi = 0.999 * amax;
        double c = hi - inv_phi * (hi - lo);
        double d = lo + inv_phi * (hi - lo);
        double fc = beta_at(prob, c, nullptr, nullptr, nullptr);
        double fd = beta_at(prob, d, nullptr, nullptr, nullptr);
        for (int it = 0; it < 40; ++it) {
            if (fc > fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = beta_at(prob, c, nullptr, nullptr, nullptr);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = beta_at(prob, d, nullptr, nullptr, nullptr);
            }
        }
        chosen = 0.5 * (lo + hi);
    }

    ContractionCertificate cert;
    cert.alpha = chosen;
    cert.alpha_max = amax;
    cert.hessian_bounds_used = prob.hessian_bounds();
    cert.beta = beta_at(prob, chosen, &cert.theta, &cert.theta_inverse, &cert.q_form);
    if (cert.beta <= 0.0)
        throw CertificationError(
            "certify: Q not positive definite at the chosen alpha (internal inconsistency)");
    return cert;
}

double weighted_distance(const DenseMatrix& theta, const Vec& z1, const Vec& z2) {
    if (z1.size() != z2.size() || theta.cols() != z1.size())
        throw DimensionError("weighted_distance: dimensions do not match");
    return norm2(theta * vec_sub(z1, z2));
}

double empirical_rate(const Trajectory& traj1, const Trajectory& traj2,
                      const DenseMatrix& theta, std::pair<double, double> window) {
    if (traj1.times.size() != traj2.times.size())
        throw DimensionError("empirical_rate: trajectories have different grids");
    const auto [t_a, t_b] = window;
    if (!(t_a < t_b)) throw WindowError("empirical_rate: empty window");
    if (t_a < traj1.times.front() || t_b > traj1.times.back())
        throw WindowError("empirical_rate: window outside the time grid");

    // Least squares fit of log d(t) = a + b t; rate = -b.
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < traj1.times.size(); ++i) {
        const double t = traj1.times[i];
        if (t < t_a || t > t_b) continue;
        const double d = weighted_distance(theta, traj1.states[i], traj2.states[i]);
        if (d <= 0.0)
            throw DegeneratePairError("empirical_rate: zero distance inside the window");
        const double y = std::log(d);
        sum_t += t;
        sum_y += y;
        sum_tt += t * t;
        sum_ty += t * y;
        ++count;
    }
    if (count < 2) throw WindowError("empirical_rate: fewer than two samples in window");
    const double denom = count * sum_tt - sum_t * sum_t;
    if (std::abs(denom) < 1e-300)
        throw WindowError("empirical_rate: degenerate time samples");
    const double slope = (count * sum_ty - sum_t * sum_y) / denom;
    return -slope;
}

}  // namespace pdc
