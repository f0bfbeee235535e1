#include "hsricc/hinf.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "hsricc/rng.hpp"

namespace hsricc {

ControlPlant ControlPlant::checked(TripletPtr triplet, Eigen::MatrixXd a, Eigen::MatrixXd b1,
                                   Eigen::MatrixXd b2, Eigen::MatrixXd c1, double gamma_perf) {
    const int n = triplet->dim();
    if (a.rows() != n || a.cols() != n) throw DimensionError("ControlPlant: a_mat is not n x n");
    if (b1.size() == 0) b1 = Eigen::MatrixXd::Zero(n, 0);
    if (b1.rows() != n) throw DimensionError("ControlPlant: b1_mat must have n rows");
    if (b2.rows() != n) throw DimensionError("ControlPlant: b2_mat must have n rows");
    if (c1.cols() != n) throw DimensionError("ControlPlant: c1_mat must have n columns");
    if (!(gamma_perf > 0.0)) throw CertificateError("ControlPlant: gamma_perf must be > 0");
    return ControlPlant{std::move(triplet), std::move(a), std::move(b1), std::move(b2),
                        std::move(c1), gamma_perf};
}

RiccatiProblem build_riccati_problem(const ControlPlant& plant) {
    const double inv_g2 = std::isinf(plant.gamma_perf)
                              ? 0.0
                              : 1.0 / (plant.gamma_perf * plant.gamma_perf);
    Eigen::MatrixXd gamma = plant.b2_mat * plant.b2_mat.transpose();
    if (inv_g2 != 0.0 && plant.b1_mat.cols() > 0)
        gamma -= inv_g2 * plant.b1_mat * plant.b1_mat.transpose();
    gamma = 0.5 * (gamma + gamma.transpose()).eval();
    Eigen::MatrixXd f = plant.c1_mat.transpose() * plant.c1_mat;
    f = 0.5 * (f + f.transpose()).eval();

    // evaluate (not assume) the certificates
    const double omega = LyapunovOperator::coercivity_constant(plant.a_mat, *plant.triplet);
    LyapunovOperator l{plant.a_mat, omega > 0.0 ? omega : 0.0};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma, Eigen::EigenvaluesOnly);
    const double gmin = es.eigenvalues().minCoeff();
    QuadraticOperator q{std::move(gamma), gmin > 0.0 ? std::optional<double>(gmin)
                                                     : std::nullopt};
    return RiccatiProblem::checked(std::move(l), std::move(q),
                                   HsOperator(plant.triplet, std::move(f)));
}

double spectral_abscissa(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw Error("spectral_abscissa: eigensolver failed");
    return es.eigenvalues().real().maxCoeff();
}

SynthesisResult synthesize(const ControlPlant& plant, const SolverConfig& cfg) {
    RiccatiProblem prob = build_riccati_problem(plant);
    const double gamma_min_eig =
        prob.Q.g0 ? *prob.Q.g0 : min_sym_eig(HsOperator(plant.triplet, prob.Q.gamma_mat));
    const double gamma_scale = 1.0 + prob.Q.gamma_mat.norm();
    const bool gamma_psd = gamma_min_eig >= -kPsdTol * gamma_scale;
    const bool gamma_coercive = gamma_min_eig > 0.0;
    const bool a_monotone =
        min_sym_eig(HsOperator(plant.triplet, plant.a_mat)) >= -1e-10 * (1.0 + plant.a_mat.norm());
    const bool f_kernel_trivial = min_sym_eig(prob.F) > 0.0;

    SolutionReport report = [&] {
        if (prob.L.omega >= 1e-10 && gamma_psd) return solve_coercive(prob, cfg);
        if (a_monotone && gamma_coercive && f_kernel_trivial)
            return solve_noncoercive(prob, cfg);
        if (prob.L.omega > 0.0 && gamma_psd) return solve_coercive(prob, cfg);
        throw HypothesesError(
            "synthesize: neither route applies (coercive needs omega > 0 and Gamma PSD; "
            "noncoercive needs sym(A) PSD, Gamma coercive and ker C1 = {0})");
    }();

    ClosedLoop loop;
    loop.p_mat = report.P.mat();
    loop.feedback_mat = -plant.b2_mat.transpose() * loop.p_mat;
    loop.atilde_mat = -plant.a_mat - plant.b2_mat * plant.b2_mat.transpose() * loop.p_mat;
    loop.spectral_abscissa = spectral_abscissa(loop.atilde_mat);
    if (!(loop.spectral_abscissa < 0.0)) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(loop.atilde_mat, false);
        std::vector<double> re(es.eigenvalues().size()), im(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            re[i] = es.eigenvalues()[i].real();
            im[i] = es.eigenvalues()[i].imag();
        }
        throw UnstableLoopError("synthesize: closed loop is not exponentially stable "
                                "(spectral abscissa " +
                                    std::to_string(loop.spectral_abscissa) + ")",
                                std::move(re), std::move(im));
    }
    return SynthesisResult{std::move(loop), std::move(report)};
}

namespace {

void resolve_grid(const ClosedLoop& cl, SimOptions& opt) {
    const double alpha = -cl.spectral_abscissa;
    if (!(alpha > 0.0) && (opt.horizon <= 0.0 || opt.dt <= 0.0))
        throw CertificateError("simulate: default grid needs a stable loop");
    if (opt.horizon <= 0.0) opt.horizon = 20.0 / alpha;
    if (opt.dt <= 0.0) opt.dt = std::min(0.1 / alpha, 1e-3 * opt.horizon);
}

}  // namespace

TrajectoryRecord simulate_closed_loop(const ClosedLoop& cl, const ControlPlant& plant,
                                      const Disturbance& dist, const SimOptions& opt_in) {
    SimOptions opt = opt_in;
    resolve_grid(cl, opt);
    const int n = plant.dim();
    const auto m1 = plant.b1_mat.cols();
    const double dt = opt.dt;
    const long steps = std::lround(opt.horizon / dt);
    if (steps < 1) throw CertificateError("simulate: empty time grid");

    const Eigen::MatrixXd& p = cl.p_mat;
    const double inv_g2 =
        std::isinf(plant.gamma_perf) ? 0.0 : 1.0 / (plant.gamma_perf * plant.gamma_perf);
    Eigen::PartialPivLU<Eigen::MatrixXd> stepper(Eigen::MatrixXd::Identity(n, n) -
                                                 dt * cl.atilde_mat);

    TrajectoryRecord rec;
    rec.dt = dt;
    int stride = opt.store_stride;
    if (stride <= 0) stride = static_cast<int>(std::max<long>(1, steps / 2048));

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    double defect_sum = 0.0, defect_check = 0.0, scale = 0.0;
    const double blowup_cap = 1e12;

    auto store = [&](double tk, const Eigen::VectorXd& yk, double unorm2, double znorm2) {
        rec.times.push_back(tk);
        rec.y_norm.push_back(yk.norm());
        rec.z_norm.push_back(std::sqrt(znorm2));
        rec.u_norm.push_back(std::sqrt(unorm2));
        const double denom = plant.gamma_perf * plant.gamma_perf * rec.energy_w;
        rec.running_ratio.push_back(
            denom > 0.0 && std::isfinite(denom) ? (rec.energy_z + rec.energy_u) / denom : 0.0);
    };
    store(0.0, y, 0.0, 0.0);

    for (long k = 0; k < steps; ++k) {
        const double t_next = (k + 1) * dt;
        Eigen::VectorXd w = dist.base ? dist.base(t_next) : Eigen::VectorXd::Zero(m1);
        if (w.size() != m1) throw DimensionError("simulate: disturbance has wrong dimension");
        if (dist.add_worst_case_feedback && inv_g2 != 0.0 && m1 > 0)
            w += inv_g2 * plant.b1_mat.transpose() * (p * y);
        const Eigen::VectorXd b1w = m1 > 0 ? (plant.b1_mat * w).eval()
                                           : Eigen::VectorXd::Zero(n).eval();
        const Eigen::VectorXd y_next = stepper.solve(y + dt * b1w);
        if (!y_next.allFinite() || y_next.norm() > blowup_cap)
            throw ConvergenceError("simulate: trajectory blow-up (unstable integration)",
                                   y_next.norm());

        const Eigen::VectorXd py = p * y_next;
        const Eigen::VectorXd u = cl.feedback_mat * y_next;
        const Eigen::VectorXd z = plant.c1_mat * y_next;
        const double u2 = u.squaredNorm(), z2 = z.squaredNorm();
        if (t_next > opt.energy_start) {
            rec.energy_w += dt * w.squaredNorm();
            rec.energy_z += dt * z2;
            rec.energy_u += dt * u2;
        }
        const double pair_a = (plant.a_mat * y_next).dot(py);
        const double pair_w = b1w.dot(py);
        defect_sum += 2.0 * dt * (pair_a + u2 - pair_w);
        scale += 2.0 * dt * (std::abs(pair_a) + u2 + std::abs(pair_w));
        const Eigen::VectorXd dy = y_next - y;
        defect_check -= (p * dy).dot(dy);
        y = y_next;
        if ((k + 1) % stride == 0 || k + 1 == steps) store(t_next, y, u2, z2);
    }

    rec.energy_defect = (p * y).dot(y) + defect_sum;
    rec.energy_defect_check = defect_check;
    rec.defect_scale = (p * y).dot(y) + scale + 1e-300;
    rec.y_final = y;
    const double denom = plant.gamma_perf * plant.gamma_perf * rec.energy_w;
    rec.ratio = denom > 0.0 && std::isfinite(denom)
                    ? (rec.energy_z + rec.energy_u) / denom
                    : 0.0;
    return rec;
}

GainReport verify_gain(const ClosedLoop& cl, const ControlPlant& plant,
                       const std::vector<Disturbance>& family, const SimOptions& opt) {
    GainReport report;
    report.rows.reserve(family.size());
    for (const Disturbance& dist : family) {
        const TrajectoryRecord rec = simulate_closed_loop(cl, plant, dist, opt);
        GainRow row{dist.label, rec.ratio, rec.energy_w, rec.energy_z + rec.energy_u};
        if (row.ratio > report.max_ratio) {
            report.max_ratio = row.ratio;
            report.worst_label = row.label;
        }
        report.rows.push_back(std::move(row));
    }
    report.pass = report.max_ratio < 1.0;
    return report;
}

std::vector<Disturbance> standard_disturbance_family(const ControlPlant& plant,
                                                     const ClosedLoop& cl, int count,
                                                     std::uint64_t seed) {
    const auto m1 = plant.b1_mat.cols();
    std::vector<Disturbance> family;
    if (m1 == 0 || count <= 0) return family;
    family.reserve(count);
    const double alpha = -cl.spectral_abscissa;
    const double horizon = 20.0 / alpha;
    const double t_off = 0.7 * horizon;  // support ends early so the tail energy is captured

    const int n_sin = count / 2;
    const int n_noise = count / 4;
    const int n_worst = count - n_sin - n_noise;

    for (int i = 0; i < n_sin; ++i) {
        const int channel = static_cast<int>(i % m1);
        const double nu =
            0.05 * alpha * std::pow(400.0, n_sin > 1 ? double(i) / (n_sin - 1) : 0.5);
        Disturbance d;
        d.label = "sin ch=" + std::to_string(channel) + " nu=" + std::to_string(nu);
        d.base = [m1, channel, nu, t_off](double t) {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(m1);
            if (t <= t_off) w[channel] = std::sin(nu * t);
            return w;
        };
        family.push_back(std::move(d));
    }
    for (int i = 0; i < n_noise; ++i) {
        // piecewise-constant noise path, held over horizon/64 intervals
        Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        const int cells = 64;
        Eigen::MatrixXd values(m1, cells);
        for (int c = 0; c < cells; ++c)
            for (Eigen::Index r = 0; r < m1; ++r) values(r, c) = rng.normal();
        const double cell_len = t_off / cells;
        Disturbance d;
        d.label = "noise path " + std::to_string(i);
        d.base = [values, cell_len, cells, t_off, m1](double t) {
            if (t > t_off) return Eigen::VectorXd::Zero(m1).eval();
            int c = static_cast<int>(t / cell_len);
            if (c >= cells) c = cells - 1;
            return values.col(c).eval();
        };
        family.push_back(std::move(d));
    }
    for (int i = 0; i < n_worst; ++i) {
        const int channel = static_cast<int>(i % m1);
        const double pulse_len = (0.05 + 0.1 * i) * horizon;
        Disturbance d;
        d.label = "worst-case ch=" + std::to_string(channel) +
                  " pulse=" + std::to_string(pulse_len);
        d.base = [m1, channel, pulse_len](double t) {
            Eigen::VectorXd w = Eigen::VectorXd::Zero(m1);
            if (t <= pulse_len) w[channel] = 1.0;
            return w;
        };
        d.add_worst_case_feedback = true;
        family.push_back(std::move(d));
    }
    return family;
}

}  // namespace hsricc
