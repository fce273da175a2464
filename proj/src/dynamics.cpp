#include "pdc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "pdc/errors.hpp"

namespace pdc {

ObserverConfig first_order_lag_observer(std::size_t state_dim,
                                        std::vector<std::size_t> unobserved_indices,
                                        double time_constant) {
    if (time_constant <= 0.0)
        throw ConfigError("first_order_lag_observer: time constant must be positive");
    ObserverConfig obs;
    std::vector<bool> unobserved(state_dim, false);
    for (std::size_t i : unobserved_indices) {
        if (i >= state_dim)
            throw ConfigError("first_order_lag_observer: index out of range");
        unobserved[i] = true;
    }
    for (std::size_t i = 0; i < state_dim; ++i)
        if (!unobserved[i]) obs.observed_indices.push_back(i);
    obs.unobserved_indices = std::move(unobserved_indices);
    obs.beta_hat = 1.0 / time_constant;
    obs.observer_field = [time_constant](const Vec& z_u_hat, const Vec& z_u, double) {
        Vec d(z_u_hat.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = (z_u[i] - z_u_hat[i]) / time_constant;
        return d;
    };
    return obs;
}

VectorField pd_vector_field(const SaddleProblem& prob) {
    const std::size_t n = prob.n();
    const std::size_t m = prob.m();
    VectorField field;
    field.dimension = n + m;
    field.label = "pd";
    field.evaluator = [&prob, n, m](const Vec& z, double t) {
        const PDState s = PDState::split(z, n, m);
        const Vec grad = prob.objective().gradient(s.x, t);
        const Vec etnu = transpose(prob.constraint_matrix()) * s.nu;
        const Vec feas = vec_sub(prob.constraint_matrix() * s.x, prob.source(t));
        Vec dz(n + m);
        for (std::size_t i = 0; i < n; ++i) dz[i] = -grad[i] - etnu[i];
        for (std::size_t i = 0; i < m; ++i) dz[n + i] = feas[i];
        return dz;
    };
    return field;
}

DenseMatrix displacement_jacobian(const SaddleProblem& prob, const Vec& x, double t) {
    (void)t;  // time enters only through q, which the Jacobian does not see
    if (x.size() != prob.n())
        throw DimensionError("displacement_jacobian: x dimension mismatch");
    const DenseMatrix h = prob.objective().hessian(x);
    const DenseMatrix& e = prob.constraint_matrix();
    const std::size_t n = prob.n();
    const std::size_t m = prob.m();
    DenseMatrix j(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) j(i, k) = -h(i, k);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            j(k, n + i) = -e(i, k);
            j(n + i, k) = e(i, k);
        }
    return j;
}

namespace {

bool state_ok(const Vec& z) {
    for (double x : z) {
        if (!std::isfinite(x) || std::abs(x) > 1e9) return false;
    }
    return true;
}

Vec rk4_step(const VectorField& f, const Vec& z, double t, double h) {
    const Vec k1 = f(z, t);
    Vec tmp(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
    const Vec k2 = f(tmp, t + 0.5 * h);
    for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
    const Vec k3 = f(tmp, t + 0.5 * h);
    for (std::size_t i = 0; i < z.size(); ++i) tmp[i] = z[i] + h * k3[i];
    const Vec k4 = f(tmp, t + h);
    Vec out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    return out;
}

}  // namespace

Trajectory integrate(const VectorField& field, const Vec& z0, double t0, double t1,
                     double step) {
    if (field.dimension != z0.size())
        throw DimensionError("integrate: field dimension does not match initial state");
    if (!(t1 > t0)) throw ConfigError("integrate: t1 must exceed t0");
    if (!(step > 0.0) || step > (t1 - t0))
        throw ConfigError("integrate: step must satisfy 0 < step <= t1 - t0");
    if (!state_ok(z0))
        throw DivergenceError("integrate: initial state not finite", t0);

    Trajectory traj;
    traj.field_label = field.label;
    traj.times.push_back(t0);
    traj.states.push_back(z0);

    double t = t0;
    Vec z = z0;
    const double t_eps = 1e-14 * std::max(1.0, std::abs(t1));
    while (t1 - t > t_eps) {
        const double remaining = t1 - t;
        const double h = std::min(step, remaining);
        Vec next = rk4_step(field, z, t, h);
        if (!state_ok(next))
            throw DivergenceError("integrate: trajectory diverged", t);
        t = (remaining <= step) ? t1 : t + h;
        z = std::move(next);
        traj.times.push_back(t);
        traj.states.push_back(z);
    }
    return traj;
}

VectorField perturbed_field(const VectorField& base,
                            std::function<Vec(const Vec&, double)> disturbance) {
    VectorField field;
    field.dimension = base.dimension;
    field.label = base.label + "+perturbed";
    auto base_eval = base.evaluator;
    field.evaluator = [base_eval, disturbance](const Vec& z, double t) {
        Vec f = base_eval(z, t);
        const Vec d = disturbance(z, t);
        if (d.size() != f.size())
            throw DimensionError("perturbed_field: disturbance dimension mismatch");
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += d[i];
        return f;
    };
    return field;
}

Vec splice_estimate(const Vec& z, const std::vector<std::size_t>& unobserved_indices,
                    const Vec& z_u_hat) {
    if (z_u_hat.size() != unobserved_indices.size())
        throw DimensionError("splice_estimate: estimate dimension mismatch");
    Vec spliced = z;
    for (std::size_t i = 0; i < unobserved_indices.size(); ++i)
        spliced[unobserved_indices[i]] = z_u_hat[i];
    return spliced;
}

VectorField observer_augmented_field(const SaddleProblem& prob, const ObserverConfig& obs) {
    const std::size_t dim = prob.state_dim();
    std::vector<bool> seen(dim, false);
    for (std::size_t i : obs.observed_indices) {
        if (i >= dim || seen[i])
            throw ConfigError("observer_augmented_field: index sets are not a partition");
        seen[i] = true;
    }
    for (std::size_t i : obs.unobserved_indices) {
        if (i >= dim || seen[i])
            throw ConfigError("observer_augmented_field: index sets are not a partition");
        seen[i] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ConfigError("observer_augmented_field: index sets do not cover the state");
    if (obs.beta_hat <= 0.0)
        throw ConfigError("observer_augmented_field: beta_hat must be positive");

    const std::size_t n_u = obs.unobserved_indices.size();
    const VectorField base = pd_vector_field(prob);
    const auto unobserved = obs.unobserved_indices;
    const auto observer = obs.observer_field;

    VectorField field;
    field.dimension = dim + n_u;
    field.label = "pd+observer";
    field.evaluator = [base, unobserved, observer, dim, n_u](const Vec& aug, double t) {
        if (aug.size() != dim + n_u)
            throw DimensionError("observer_augmented_field: state dimension mismatch");
        const Vec z(aug.begin(), aug.begin() + static_cast<std::ptrdiff_t>(dim));
        const Vec z_u_hat(aug.begin() + static_cast<std::ptrdiff_t>(dim), aug.end());
        const Vec z_hat = splice_estimate(z, unobserved, z_u_hat);
        Vec z_u(n_u);
        for (std::size_t i = 0; i < n_u; ++i) z_u[i] = z[unobserved[i]];

        const Vec dz = base(z_hat, t);
        const Vec dhat = observer(z_u_hat, z_u, t);
        Vec out;
        out.reserve(dim + n_u);
        out.insert(out.end(), dz.begin(), dz.end());
        out.insert(out.end(), dhat.begin(), dhat.end());
        return out;
    };
    return field;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_names) {
    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    out << "t";
    for (std::size_t j = 0; j < dim; ++j) {
        if (j < state_names.size())
            out << "," << state_names[j];
        else
            out << ",z" << j;
    }
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
        out << buf;
        for (double x : traj.states[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            out << "," << buf;
        }
        out << "\n";
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory CSV: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
        if (values.empty()) continue;
        traj.times.push_back(values.front());
        traj.states.emplace_back(values.begin() + 1, values.end());
    }
    if (traj.times.size() < 2) throw ConfigError("trajectory CSV: fewer than two rows");
    return traj;
}

}  // namespace pdc
