#include "pdc/problem.hpp"

#include <cmath>
#include <string>

#include "pdc/errors.hpp"

namespace pdc {

Vec PDState::flat() const {
    Vec z;
    z.reserve(x.size() + nu.size());
    z.insert(z.end(), x.begin(), x.end());
    z.insert(z.end(), nu.begin(), nu.end());
    return z;
}

PDState PDState::split(const Vec& z, std::size_t n, std::size_t m) {
    if (z.size() != n + m) throw DimensionError("PDState::split: state dimension mismatch");
    PDState s;
    s.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
    s.nu.assign(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
    return s;
}

ObjectiveModel ObjectiveModel::quadratic(DenseMatrix p, VectorSignal r) {
    if (p.rows() != p.cols()) throw DimensionError("quadratic objective: P not square");
    if (r.dim() != p.rows()) throw DimensionError("quadratic objective: r dimension mismatch");
    const auto [lmin, lmax] = sym_eig_extremes(p);
    (void)lmax;
    if (lmin <= 0.0) throw ConvexityError("quadratic objective: P not positive definite");
    ObjectiveModel m;
    m.quadratic_ = Quadratic{std::move(p), std::move(r)};
    return m;
}

ObjectiveModel ObjectiveModel::quadratic(DenseMatrix p, Vec r) {
    return quadratic(std::move(p), VectorSignal::constant(r));
}

ObjectiveModel ObjectiveModel::callable(std::function<double(const Vec&)> value,
                                        std::function<Vec(const Vec&)> gradient,
                                        std::function<DenseMatrix(const Vec&)> hessian) {
    ObjectiveModel m;
    m.value_ = std::move(value);
    m.gradient_ = std::move(gradient);
    m.hessian_ = std::move(hessian);
    return m;
}

double ObjectiveModel::value(const Vec& x, double t) const {
    if (quadratic_) {
        const Vec px = quadratic_->p * x;
        return 0.5 * dot(x, px) + dot(quadratic_->r(t), x);
    }
    return value_(x);
}

Vec ObjectiveModel::gradient(const Vec& x, double t) const {
    if (quadratic_) return vec_add(quadratic_->p * x, quadratic_->r(t));
    return gradient_(x);
}

DenseMatrix ObjectiveModel::hessian(const Vec& x) const {
    if (quadratic_) return quadratic_->p;
    return hessian_(x);
}

SaddleProblem::SaddleProblem(ObjectiveModel objective, DenseMatrix e, VectorSignal q,
                             HessianBounds bounds)
    : objective_(std::move(objective)),
      e_(std::move(e)),
      q_(std::move(q)),
      bounds_(bounds),
      n_(e_.cols()),
      m_(e_.rows()) {
    if (e_.empty()) throw DimensionError("SaddleProblem: empty constraint matrix");
    if (q_.dim() != m_) throw DimensionError("SaddleProblem: q dimension does not match E rows");
    if (bounds_.h_min <= 0.0)
        throw ConvexityError("SaddleProblem: h_min must be positive (strict convexity)");
    if (bounds_.h_min > bounds_.h_max)
        throw ConvexityError("SaddleProblem: h_min exceeds h_max");
    const double smin = smallest_singular_value(e_);
    if (smin <= 1e-10)
        throw RankError("SaddleProblem: E is not full row rank (smallest singular value " +
                        std::to_string(smin) + ")");
}

SaddleProblem make_quadratic_problem(const DenseMatrix& p, const VectorSignal& r,
                                     const DenseMatrix& e, const VectorSignal& q) {
    if (p.rows() != e.cols())
        throw DimensionError("make_quadratic_problem: P and E dimensions do not match");
    const auto [lmin, lmax] = sym_eig_extremes(p);
    if (lmin <= 0.0)
        throw ConvexityError("make_quadratic_problem: P not positive definite");
    return SaddleProblem(ObjectiveModel::quadratic(p, r), e, q, HessianBounds{lmin, lmax});
}

SaddleProblem make_quadratic_problem(const DenseMatrix& p, const Vec& r,
                                     const DenseMatrix& e, const VectorSignal& q) {
    return make_quadratic_problem(p, VectorSignal::constant(r), e, q);
}

DenseMatrix incidence_from_edges(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                 std::size_t n_nodes) {
    DenseMatrix e(edges.size(), n_nodes);
    for (std::size_t row = 0; row < edges.size(); ++row) {
        const auto [u, v] = edges[row];
        if (u >= n_nodes || v >= n_nodes)
            throw GraphError("incidence_from_edges: node index out of range");
        if (u == v) throw GraphError("incidence_from_edges: self-loop");
        e(row, u) = 1.0;
        e(row, v) = -1.0;
    }
    return e;
}

double lagrangian_value(const SaddleProblem& prob, const PDState& z, double t) {
    if (z.x.size() != prob.n() || z.nu.size() != prob.m())
        throw DimensionError("lagrangian_value: state dimensions do not match problem");
    const Vec violation = vec_sub(prob.constraint_matrix() * z.x, prob.source(t));
    return prob.objective().value(z.x, t) + dot(z.nu, violation);
}

Vec kkt_residual(const SaddleProblem& prob, const PDState& z, double t) {
    const Vec grad = prob.objective().gradient(z.x, t);
    const Vec etnu = transpose(prob.constraint_matrix()) * z.nu;
    const Vec stat = vec_add(grad, etnu);
    const Vec feas = vec_sub(prob.constraint_matrix() * z.x, prob.source(t));
    Vec r;
    r.reserve(stat.size() + feas.size());
    r.insert(r.end(), stat.begin(), stat.end());
    r.insert(r.end(), feas.begin(), feas.end());
    return r;
}

namespace {

DenseMatrix kkt_matrix(const DenseMatrix& h, const DenseMatrix& e) {
    const std::size_t n = h.rows();
    const std::size_t m = e.rows();
    DenseMatrix k(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) k(i, j) = h(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k(n + i, j) = e(i, j);
            k(j, n + i) = e(i, j);
        }
    return k;
}

}  // namespace

PDState instantaneous_optimum(const SaddleProblem& prob, double t) {
    const std::size_t n = prob.n();
    const std::size_t m = prob.m();

    if (prob.objective().is_quadratic()) {
        // [P E^T; E 0] [x; nu] = [-r(t); q(t)]
        const DenseMatrix k = kkt_matrix(prob.objective().quadratic_p(), prob.constraint_matrix());
        Vec rhs(n + m);
        const Vec r = prob.objective().linear_term(t);
        const Vec q = prob.source(t);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
        for (std::size_t i = 0; i < m; ++i) rhs[n + i] = q[i];
        return PDState::split(solve_linear(k, rhs), n, m);
    }

    // Damped Newton on the KKT residual.
    PDState z{Vec(n, 0.0), Vec(m, 0.0)};
    Vec res = kkt_residual(prob, z, t);
    double res_norm = norm_inf(res);
    for (int iter = 0; iter < 100; ++iter) {
        if (res_norm <= 1e-10) return z;
        const DenseMatrix k = kkt_matrix(prob.objective().hessian(z.x), prob.constraint_matrix());
        const Vec step = solve_linear(k, vec_scale(-1.0, res));
        double damping = 1.0;
        while (true) {
            PDState trial = z;
            for (std::size_t i = 0; i < n; ++i) trial.x[i] += damping * step[i];
            for (std::size_t i = 0; i < m; ++i) trial.nu[i] += damping * step[n + i];
            const Vec trial_res = kkt_residual(prob, trial, t);
            const double trial_norm = norm_inf(trial_res);
            if (trial_norm < res_norm) {
                z = std::move(trial);
                res = trial_res;
                res_norm = trial_norm;
                break;
            }
            damping *= 0.5;
            if (damping < std::ldexp(1.0, -20))
                throw OptimizerError("instantaneous_optimum: Newton damping floor reached",
                                     res_norm);
        }
    }
    if (res_norm <= 1e-10) return z;
    throw OptimizerError("instantaneous_optimum: Newton did not converge", res_norm);
}

double optimum_rate(const SaddleProblem& prob, double t, double h, const DenseMatrix* theta) {
    if (h <= 0.0) throw ConfigError("optimum_rate: differencing step must be positive");
    const Vec zp = instantaneous_optimum(prob, t + h).flat();
    const Vec zm = instantaneous_optimum(prob, t - h).flat();
    Vec rate = vec_scale(1.0 / (2.0 * h), vec_sub(zp, zm));
    if (theta) rate = (*theta) * rate;
    return norm2(rate);
}

}  // namespace pdc
