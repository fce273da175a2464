#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pdc/matrix.hpp"
#include "pdc/signal.hpp"

namespace pdc {

/// Full primal-dual state z = (x, nu).
struct PDState {
    Vec x;
    Vec nu;

    Vec flat() const;
    static PDState split(const Vec& z, std::size_t n, std::size_t m);
};

/// Strictly convex objective g(x). Either an explicit quadratic
/// 1/2 x^T P x + r(t)^T x, or user-supplied gradient/Hessian evaluators.
class ObjectiveModel {
public:
    static ObjectiveModel quadratic(DenseMatrix p, VectorSignal r);
    static ObjectiveModel quadratic(DenseMatrix p, Vec r);
    static ObjectiveModel callable(std::function<double(const Vec&)> value,
                                   std::function<Vec(const Vec&)> gradient,
                                   std::function<DenseMatrix(const Vec&)> hessian);

    bool is_quadratic() const { return quadratic_.has_value(); }

    double value(const Vec& x, double t) const;
    Vec gradient(const Vec& x, double t) const;
    DenseMatrix hessian(const Vec& x) const;

    const DenseMatrix& quadratic_p() const { return quadratic_->p; }
    Vec linear_term(double t) const { return quadratic_->r(t); }

private:
    struct Quadratic {
        DenseMatrix p;
        VectorSignal r;
    };
    std::optional<Quadratic> quadratic_;
    std::function<double(const Vec&)> value_;
    std::function<Vec(const Vec&)> gradient_;
    std::function<DenseMatrix(const Vec&)> hessian_;
};

struct HessianBounds {
    double h_min;
    double h_max;
};

/// Equality-constrained saddle problem: minimize g(x) subject to E x = q(t).
/// E must have full row rank; g must be strictly convex with uniform Hessian
/// bounds over the admissible domain.
class SaddleProblem {
public:
    SaddleProblem(ObjectiveModel objective, DenseMatrix e, VectorSignal q,
                  HessianBounds bounds);

    std::size_t n() const { return n_; }
    std::size_t m() const { return m_; }
    std::size_t state_dim() const { return n_ + m_; }

    const ObjectiveModel& objective() const { return objective_; }
    const DenseMatrix& constraint_matrix() const { return e_; }
    Vec source(double t) const { return q_(t); }
    const VectorSignal& source_signal() const { return q_; }
    HessianBounds hessian_bounds() const { return bounds_; }

private:
    ObjectiveModel objective_;
    DenseMatrix e_;
    VectorSignal q_;
    HessianBounds bounds_;
    std::size_t n_;
    std::size_t m_;
};

/// Canonical quadratic instantiation: g(x) = 1/2 x^T P x + r^T x, E x = q(t).
/// Hessian bounds are the extreme eigenvalues of P.
SaddleProblem make_quadratic_problem(const DenseMatrix& p, const Vec& r,
                                     const DenseMatrix& e, const VectorSignal& q);
SaddleProblem make_quadratic_problem(const DenseMatrix& p, const VectorSignal& r,
                                     const DenseMatrix& e, const VectorSignal& q);

/// Oriented incidence matrix: row per edge (u, v), +1 at u, -1 at v.
DenseMatrix incidence_from_edges(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 std::size_t n_nodes);

double lagrangian_value(const SaddleProblem& prob, const PDState& z, double t);

/// KKT point of the problem frozen at time t. Quadratic objectives solve the
/// dense KKT system directly; callable ones run damped Newton to residual
/// 1e-10 (max 100 iterations).
PDState instantaneous_optimum(const SaddleProblem& prob, double t);

Vec kkt_residual(const SaddleProblem& prob, const PDState& z, double t);

/// Central-difference estimate of ||dz*/dt|| at t. The norm is Euclidean
/// unless a metric Theta is supplied.
double optimum_rate(const SaddleProblem& prob, double t, double h,
                    const DenseMatrix* theta = nullptr);

}  // namespace pdc
