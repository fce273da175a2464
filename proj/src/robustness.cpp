#include "pdc/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pdc/errors.hpp"

namespace pdc {

double bound_tracking(double beta, double sup_rate) {
    if (!(beta > 0.0)) throw ConditionError("bound_tracking: requires beta > 0");
    if (sup_rate < 0.0) throw ConditionError("bound_tracking: sup_rate must be nonnegative");
    return sup_rate / beta;
}

double bound_approx_to_pd(double beta, double xi, double sup_estimate_error) {
    if (!(beta > 0.0)) throw ConditionError("bound_approx_to_pd: requires beta > 0");
    return xi * sup_estimate_error / beta;
}

double bound_observer_error(double eta, double beta_hat, double xi, double sup_tracking) {
    if (!(beta_hat > xi))
        throw ConditionError("bound_observer_error: requires beta_hat > xi");
    return eta * sup_tracking / (beta_hat - xi);
}

double bound_tracking_with_observer(double beta, double beta_hat, double xi, double eta,
                                    double sup_rate) {
    if (!(beta_hat > xi))
        throw ConditionError("bound_tracking_with_observer: requires beta_hat > xi");
    const double denom = beta * (beta_hat - xi) - eta * xi;
    if (!(denom > 0.0))
        throw ConditionError(
            "bound_tracking_with_observer: requires beta*(beta_hat - xi) - eta*xi > 0");
    return (beta_hat - xi) / denom * sup_rate;
}

double bound_perturbed_to_pd(double beta, double beta_hat, double xi, double eta,
                             double sup_rate) {
    if (!(beta_hat > xi))
        throw ConditionError("bound_perturbed_to_pd: requires beta_hat > xi");
    const double denom = beta * (beta_hat - xi) - eta * xi;
    if (!(denom > 0.0))
        throw ConditionError(
            "bound_perturbed_to_pd: requires beta*(beta_hat - xi) - eta*xi > 0");
    return (1.0 / beta) * (eta * xi) / denom * sup_rate;
}

namespace {

DenseMatrix pd_system_matrix(const SaddleProblem& prob) {
    const DenseMatrix& e = prob.constraint_matrix();
    const DenseMatrix& p = prob.objective().quadratic_p();
    const std::size_t n = prob.n();
    const std::size_t m = prob.m();
    DenseMatrix a(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = -p(i, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a(j, n + i) = -e(i, j);
            a(n + i, j) = e(i, j);
        }
    return a;
}

DenseMatrix select_columns(const DenseMatrix& a, const std::vector<std::size_t>& cols) {
    DenseMatrix out(a.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, cols[j]);
    return out;
}

}  // namespace

LipschitzEstimates estimate_lipschitz(const SaddleProblem& prob,
                                      const ContractionCertificate& cert,
                                      const ObserverConfig& obs, const StateBox& domain,
                                      std::size_t samples, std::uint64_t seed) {
    const std::size_t dim = prob.state_dim();
    if (domain.lower.size() != dim || domain.upper.size() != dim)
        throw SamplingError("estimate_lipschitz: domain box dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i)
        if (!(domain.lower[i] < domain.upper[i]))
            throw SamplingError("estimate_lipschitz: degenerate domain box");
    LipschitzEstimates est;
    if (prob.objective().is_quadratic()) {
        const DenseMatrix a_theta = cert.theta * pd_system_matrix(prob) * cert.theta_inverse;
        est.method = LipschitzEstimates::Method::AnalyticLinear;
        est.eta = spectral_norm(a_theta);
        est.xi = obs.unobserved_indices.empty()
                     ? 0.0
                     : spectral_norm(select_columns(a_theta, obs.unobserved_indices));
        return est;
    }

    // Sampled ratio maxima, inflated: an estimate, not a certificate.
    if (samples < 1) throw SamplingError("estimate_lipschitz: needs at least one sample");
    const VectorField field = pd_vector_field(prob);
    const PDState zstar = instantaneous_optimum(prob, 0.0);
    const Vec zstar_flat = zstar.flat();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto sample_point = [&]() {
        Vec z(dim);
        for (std::size_t i = 0; i < dim; ++i)
            z[i] = domain.lower[i] + unif(rng) * (domain.upper[i] - domain.lower[i]);
        return z;
    };

    est.method = LipschitzEstimates::Method::Sampled;
    est.sample_count = samples;
    double xi_best = 0.0;
    double eta_best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec z = sample_point();

        const Vec fz = field(z, 0.0);
        const double dist = weighted_distance(cert.theta, z, zstar_flat);
        if (dist > 1e-12) {
            const double ratio = norm2(cert.theta * fz) / dist;
            if (ratio > eta_best) {
                eta_best = ratio;
                est.eta_maximizer = z;
            }
        }

        if (!obs.unobserved_indices.empty()) {
            Vec z_hat = z;
            for (std::size_t i : obs.unobserved_indices)
                z_hat[i] = domain.lower[i] + unif(rng) * (domain.upper[i] - domain.lower[i]);
            const double sep = weighted_distance(cert.theta, z_hat, z);
            if (sep > 1e-12) {
                const Vec diff = vec_sub(field(z_hat, 0.0), fz);
                const double ratio = norm2(cert.theta * diff) / sep;
                if (ratio > xi_best) {
                    xi_best = ratio;
                    est.xi_maximizer = z;
                }
            }
        }
    }
    est.eta = 1.1 * eta_best;
    est.xi = 1.1 * xi_best;
    return est;
}

double observer_forcing_gain(const SaddleProblem& prob, const ContractionCertificate& cert,
                             const ObserverConfig& obs) {
    if (!prob.objective().is_quadratic())
        throw ConditionError("observer_forcing_gain: requires a quadratic objective");
    const DenseMatrix ati = pd_system_matrix(prob) * cert.theta_inverse;
    DenseMatrix rows(obs.unobserved_indices.size(), ati.cols());
    for (std::size_t r = 0; r < obs.unobserved_indices.size(); ++r)
        for (std::size_t j = 0; j < ati.cols(); ++j)
            rows(r, j) = ati(obs.unobserved_indices[r], j);
    return spectral_norm(rows);
}

BoundReport validate_bound(const std::string& bound_id, const std::vector<double>& times,
                           const std::vector<double>& distances, double predicted,
                           double transient_cutoff, std::map<std::string, double> constants) {
    if (times.size() != distances.size())
        throw DimensionError("validate_bound: times/distances length mismatch");
    if (times.empty() || transient_cutoff > times.back())
        throw WindowError("validate_bound: transient cutoff beyond the time grid");

    BoundReport report;
    report.bound_id = bound_id;
    report.constants = std::move(constants);
    report.predicted = predicted;
    report.transient_cutoff = transient_cutoff;
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= transient_cutoff) sup = std::max(sup, distances[i]);
    report.observed_sup = sup;
    report.satisfied = sup <= predicted * (1.0 + 1e-6);
    return report;
}

std::vector<double> distance_to_optimum_series(const Trajectory& traj,
                                               const SaddleProblem& prob,
                                               const DenseMatrix& theta) {
    const std::size_t dim = prob.state_dim();
    std::vector<double> out(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const Vec zstar = instantaneous_optimum(prob, traj.times[i]).flat();
        Vec z(traj.states[i].begin(), traj.states[i].begin() + static_cast<std::ptrdiff_t>(dim));
        out[i] = weighted_distance(theta, z, zstar);
    }
    return out;
}

std::vector<double> distance_series(const Trajectory& a, const Trajectory& b,
                                    const DenseMatrix& theta) {
    if (a.times.size() != b.times.size())
        throw DimensionError("distance_series: trajectories have different grids");
    const std::size_t dim = theta.cols();
    std::vector<double> out(a.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (a.states[i].size() < dim || b.states[i].size() < dim)
            throw DimensionError("distance_series: state shorter than metric dimension");
        Vec za(a.states[i].begin(), a.states[i].begin() + static_cast<std::ptrdiff_t>(dim));
        Vec zb(b.states[i].begin(), b.states[i].begin() + static_cast<std::ptrdiff_t>(dim));
        out[i] = weighted_distance(theta, za, zb);
    }
    return out;
}

double sup_optimum_rate(const SaddleProblem& prob, const DenseMatrix& theta, double t0,
                        double t1, std::size_t grid_points) {
    if (!(t1 > t0)) throw WindowError("sup_optimum_rate: empty window");
    double sup = 0.0;
    const double h = 1e-5 * (t1 - t0);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) /
                                  static_cast<double>(grid_points - 1);
        sup = std::max(sup, optimum_rate(prob, t, h, &theta));
    }
    return sup;
}

std::string bound_report_json(const BoundReport& report) {
    nlohmann::ordered_json j;
    j["bound_id"] = report.bound_id;
    j["constants"] = report.constants;
    j["predicted"] = report.predicted;
    j["observed_sup"] = report.observed_sup;
    j["transient_cutoff"] = report.transient_cutoff;
    j["satisfied"] = report.satisfied;
    j["condition_violated"] = report.condition_violated;
    if (!report.note.empty()) j["note"] = report.note;
    return j.dump(2);
}

std::string bound_report_csv_row(const BoundReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << report.bound_id << "," << report.predicted << "," << report.observed_sup << ","
        << report.transient_cutoff << "," << (report.satisfied ? 1 : 0) << ","
        << (report.condition_violated ? 1 : 0);
    return out.str();
}

}  // namespace pdc
