#include "pdc/agc.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "pdc/errors.hpp"
#include "pdc/serialize.hpp"

namespace pdc {

namespace {

void require_diag_pd(const DenseMatrix& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionError(std::string(what) + " must be square");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0)
                throw ConfigError(std::string(what) + " must be diagonal");
        if (!(m(i, i) > 0.0))
            throw ConfigError(std::string(what) + " must have strictly positive diagonal");
    }
}

/// [B^{1/2} E; -k^T]
DenseMatrix stack_constraints(const AgcConfig& cfg) {
    const std::size_t lines = cfg.incidence.rows();
    const std::size_t n = cfg.incidence.cols();
    DenseMatrix stacked(lines + 1, n);
    for (std::size_t i = 0; i < lines; ++i) {
        const double b_sqrt = std::sqrt(cfg.susceptance(i, i));
        for (std::size_t j = 0; j < n; ++j) stacked(i, j) = b_sqrt * cfg.incidence(i, j);
    }
    for (std::size_t j = 0; j < n; ++j) stacked(lines, j) = -cfg.gains[j];
    return stacked;
}

}  // namespace

AgcConfig AgcConfig::smib_default() {
    AgcConfig cfg;
    cfg.n_gen = 1;
    cfg.damping = DenseMatrix::identity(1);
    cfg.susceptance = DenseMatrix::identity(1);
    cfg.incidence = DenseMatrix::from_rows({{1.0}});
    cfg.gains = {1.0};
    cfg.turbine_T = 0.05;
    cfg.torque_amplitude = 0.1;
    cfg.torque_omega = 0.5;
    return cfg;
}

AgcProblem build_agc_problem(const AgcConfig& cfg) {
    require_diag_pd(cfg.damping, "damping D");
    require_diag_pd(cfg.susceptance, "susceptance B");
    if (cfg.turbine_T <= 0.0) throw ConfigError("turbine time constant must be positive");
    if (cfg.incidence.cols() != cfg.n_gen || cfg.damping.rows() != cfg.n_gen ||
        cfg.gains.size() != cfg.n_gen || cfg.susceptance.rows() != cfg.incidence.rows())
        throw DimensionError("AGC config dimensions are inconsistent");

    const DenseMatrix stacked = stack_constraints(cfg);
    const std::size_t m_full = stacked.rows();

    // A zero row means the corresponding dual never couples back to the
    // frequency (e.g. k = 0), which leaves that state unregulated.
    for (std::size_t i = 0; i < m_full; ++i) {
        double row_norm = 0.0;
        for (std::size_t j = 0; j < stacked.cols(); ++j)
            row_norm += stacked(i, j) * stacked(i, j);
        if (row_norm < 1e-20)
            throw RankError("build_agc_problem: constraint row " + std::to_string(i) +
                            " is zero (decoupled dual)");
    }

    // Reduce the dual space to the row space of the stack when it is
    // rank-deficient; the frequency flow is unchanged because the dropped
    // dual directions never enter E^T nu.
    const auto eig = sym_eig(stacked * transpose(stacked));
    double lmax = 0.0;
    for (double v : eig.values) lmax = std::max(lmax, v);
    const double tol = 1e-12 * std::max(lmax, 1.0);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < eig.values.size(); ++j)
        if (eig.values[j] > tol) kept.push_back(j);
    if (kept.empty()) throw RankError("build_agc_problem: constraint stack has rank zero");

    DenseMatrix basis(m_full, kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j)
        for (std::size_t i = 0; i < m_full; ++i) basis(i, j) = eig.vectors(i, kept[j]);

    const DenseMatrix e_red = transpose(basis) * stacked;

    // Sinusoidal torque enters the primal equation as a time-varying linear
    // term of the objective, so the instantaneous optimum tracks it.
    std::vector<Signal> torque;
    torque.reserve(cfg.n_gen);
    for (std::size_t i = 0; i < cfg.n_gen; ++i)
        torque.push_back(Signal::sinusoid(-cfg.torque_amplitude, cfg.torque_omega));
    const VectorSignal r(std::move(torque));

    AgcProblem out{
        make_quadratic_problem(cfg.damping, r, e_red, VectorSignal::zero(e_red.rows())),
        stacked, basis};
    return out;
}

VectorField agc_true_field(const AgcConfig& cfg) {
    const DenseMatrix stacked = stack_constraints(cfg);
    const std::size_t n = cfg.n_gen;
    const std::size_t m = stacked.rows();
    const double amp = cfg.torque_amplitude;
    const double freq = cfg.torque_omega;
    const DenseMatrix damping = cfg.damping;
    const DenseMatrix stacked_t = transpose(stacked);

    VectorField field;
    field.dimension = n + m;
    field.label = "agc-true";
    field.evaluator = [=](const Vec& z, double t) {
        const PDState s = PDState::split(z, n, m);
        const Vec d_omega = damping * s.x;
        const Vec etnu = stacked_t * s.nu;
        const Vec feas = stacked * s.x;
        Vec dz(n + m);
        const double torque = amp * std::sin(freq * t);
        for (std::size_t i = 0; i < n; ++i) dz[i] = -d_omega[i] - etnu[i] + torque;
        for (std::size_t i = 0; i < m; ++i) dz[n + i] = feas[i];
        return dz;
    };
    return field;
}

VectorField agc_delayed_field(const AgcConfig& cfg) {
    const DenseMatrix stacked = stack_constraints(cfg);
    const std::size_t n = cfg.n_gen;
    const std::size_t m = stacked.rows();
    const double amp = cfg.torque_amplitude;
    const double freq = cfg.torque_omega;
    const double inv_t = 1.0 / cfg.turbine_T;
    const DenseMatrix damping = cfg.damping;
    const DenseMatrix stacked_t = transpose(stacked);
    const Vec gains = cfg.gains;

    VectorField field;
    field.dimension = n + m + 1;
    field.label = "agc-delayed";
    field.evaluator = [=](const Vec& z, double t) {
        const Vec core(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n + m));
        const PDState s = PDState::split(core, n, m);
        const double u_agc = s.nu[m - 1];
        const double u_hat = z[n + m];

        const Vec d_omega = damping * s.x;
        const Vec etnu = stacked_t * s.nu;
        const Vec feas = stacked * s.x;
        Vec dz(n + m + 1);
        const double torque = amp * std::sin(freq * t);
        // Frequency responds to the delayed effort: -E~^T nu contributes
        // -k u_agc via the last stacked row; swap in u_hat instead.
        for (std::size_t i = 0; i < n; ++i)
            dz[i] = -d_omega[i] - etnu[i] + gains[i] * (u_hat - u_agc) + torque;
        for (std::size_t i = 0; i < m; ++i) dz[n + i] = feas[i];
        dz[n + m] = inv_t * (u_agc - u_hat);
        return dz;
    };
    return field;
}

Vec agc_to_reduced(const AgcProblem& prob, const AgcConfig& cfg, const Vec& z_full) {
    const std::size_t n = cfg.n_gen;
    const std::size_t m_full = prob.stacked_e.rows();
    if (z_full.size() < n + m_full)
        throw DimensionError("agc_to_reduced: state too short");
    Vec nu(z_full.begin() + static_cast<std::ptrdiff_t>(n),
           z_full.begin() + static_cast<std::ptrdiff_t>(n + m_full));
    const Vec nu_red = transpose(prob.dual_basis) * nu;
    Vec out(z_full.begin(), z_full.begin() + static_cast<std::ptrdiff_t>(n));
    out.insert(out.end(), nu_red.begin(), nu_red.end());
    return out;
}

AgcDemoResult run_agc_demo(const AgcConfig& cfg, double t0, double t1, double step) {
    const AgcProblem prob = build_agc_problem(cfg);
    const std::size_t n = cfg.n_gen;
    const std::size_t m_red = prob.reduced.m();

    AgcDemoResult result;
    result.stacked_e = prob.stacked_e;
    result.reduced_e = prob.reduced.constraint_matrix();
    result.dual_basis = prob.dual_basis;
    result.certificate = certify(prob.reduced);
    const ContractionCertificate& cert = result.certificate;
    result.beta_hat = 1.0 / cfg.turbine_T;

    // eta: norm of the reduced PD matrix in Theta coordinates.
    DenseMatrix a(n + m_red, n + m_red);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = -cfg.damping(i, j);
    const DenseMatrix& e_red = prob.reduced.constraint_matrix();
    for (std::size_t i = 0; i < m_red; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a(j, n + i) = -e_red(i, j);
            a(n + i, j) = e_red(i, j);
        }
    result.eta = spectral_norm(cert.theta * a * cert.theta_inverse);

    // xi: exact gain from a unit delay error e = u_hat - u_agc. The field
    // defect is k*e on the frequency; the estimate error embeds into the
    // reduced duals through the dual basis row of u_agc.
    Vec d_dir(n + m_red, 0.0);
    for (std::size_t i = 0; i < n; ++i) d_dir[i] = cfg.gains[i];
    Vec e_dir(n + m_red, 0.0);
    const std::size_t u_row = prob.stacked_e.rows() - 1;
    for (std::size_t j = 0; j < m_red; ++j) e_dir[n + j] = prob.dual_basis(u_row, j);
    const double e_dir_norm = norm2(cert.theta * e_dir);
    if (e_dir_norm < 1e-12)
        throw ConditionError("run_agc_demo: AGC dual not represented in the reduced basis");
    result.xi = norm2(cert.theta * d_dir) / e_dir_norm;

    result.sup_rate = sup_optimum_rate(prob.reduced, cert.theta, t0, t1);

    double predicted;
    try {
        predicted = bound_tracking_with_observer(cert.beta, result.beta_hat, result.xi,
                                                 result.eta, result.sup_rate);
    } catch (const ConditionError& err) {
        throw ConditionError(std::string(err.what()) +
                             " (reduce the turbine delay T or the torque A*Omega)");
    }

    const std::size_t m_full = prob.stacked_e.rows();
    const Vec z0_true(n + m_full, 0.0);
    const Vec z0_delayed(n + m_full + 1, 0.0);
    result.true_trajectory = integrate(agc_true_field(cfg), z0_true, t0, t1, step);
    result.delayed_trajectory = integrate(agc_delayed_field(cfg), z0_delayed, t0, t1, step);

    const std::size_t steps = result.delayed_trajectory.times.size();
    result.times = result.delayed_trajectory.times;
    result.error_theta.resize(steps);
    result.error_euclid.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const Vec z_red = agc_to_reduced(prob, cfg, result.delayed_trajectory.states[i]);
        const Vec zstar = instantaneous_optimum(prob.reduced, result.times[i]).flat();
        result.error_theta[i] = weighted_distance(cert.theta, z_red, zstar);
        result.error_euclid[i] = norm2(vec_sub(z_red, zstar));
    }

    const double cutoff = std::min(t0 + 8.0 / cert.beta, t1);
    result.report = validate_bound(
        "tracking_with_observer", result.times, result.error_theta, predicted, cutoff,
        {{"beta", cert.beta},
         {"beta_hat", result.beta_hat},
         {"xi", result.xi},
         {"eta", result.eta},
         {"sup_rate", result.sup_rate},
         {"alpha", cert.alpha}});
    return result;
}

void write_agc_artifacts(const AgcDemoResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::ofstream csv(fs::path(out_dir) / "agc_error.csv");
    csv << "t,error,error_euclid,bound\n";
    char buf[40];
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", result.times[i]);
        csv << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", result.error_theta[i]);
        csv << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", result.error_euclid[i]);
        csv << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", result.report.predicted);
        csv << "," << buf << "\n";
    }

    nlohmann::ordered_json j;
    j["report"] = nlohmann::ordered_json::parse(bound_report_json(result.report));
    j["certificate"] = certificate_to_json(result.certificate);
    j["constraints"]["stacked_e"] = matrix_to_json(result.stacked_e);
    j["constraints"]["reduced_e"] = matrix_to_json(result.reduced_e);
    j["constraints"]["dual_basis"] = matrix_to_json(result.dual_basis);
    j["constants"]["beta_hat"] = result.beta_hat;
    j["constants"]["xi"] = result.xi;
    j["constants"]["eta"] = result.eta;
    j["constants"]["sup_rate"] = result.sup_rate;
    std::ofstream json_out(fs::path(out_dir) / "agc_report.json");
    json_out << j.dump(2) << "\n";
}

}  // namespace pdc
