#include "hsricc/riccati.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hsricc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Eigen::MatrixXd residual_mat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                             const Eigen::MatrixXd& f, const Eigen::MatrixXd& p) {
    return a.transpose() * p + p * a + p * g * p - f;
}

void check_solution_shape(const Eigen::MatrixXd& p) {
    const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10)
        throw BoundViolationError("riccati: accepted solution lost symmetry (dev " +
                                  sci(asym) + ")");
}

// Ring of the most recent continuation-stage solutions, with Richardson
// extrapolation to stage value 0 (Neville at 0). The stage solutions depend
// analytically on λ (and on ω), so the extrapolants kill the leading bias
// terms; they are accepted only on the strength of their recomputed residual.
class StageRing {
public:
    void push(double value, const Eigen::MatrixXd& sol) {
        if (vals_.size() == 3) {
            vals_.erase(vals_.begin());
            sols_.erase(sols_.begin());
        }
        vals_.push_back(value);
        sols_.push_back(sol);
    }

    // extrapolants of order 1 (two points) and 2 (three points), newest last
    std::vector<std::pair<int, Eigen::MatrixXd>> candidates() const {
        std::vector<std::pair<int, Eigen::MatrixXd>> out;
        const size_t m = vals_.size();
        for (size_t use = 2; use <= m; ++use) {
            std::vector<double> x(vals_.end() - use, vals_.end());
            std::vector<Eigen::MatrixXd> t(sols_.end() - use, sols_.end());
            for (size_t level = 1; level < use; ++level)
                for (size_t i = 0; i + level < use; ++i)
                    t[i] = (x[i + level] * t[i] - x[i] * t[i + 1]) / (x[i + level] - x[i]);
            out.emplace_back(static_cast<int>(use) - 1, std::move(t[0]));
        }
        return out;
    }

private:
    std::vector<double> vals_;
    std::vector<Eigen::MatrixXd> sols_;
};

// PSD projection by eigenvalue clamping (for extrapolants that dip below 0 by
// roundoff-level amounts).
Eigen::MatrixXd clamp_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

RiccatiProblem RiccatiProblem::checked(LyapunovOperator l, QuadraticOperator q, HsOperator f) {
    const int n = f.dim();
    if (l.a_mat.rows() != n || l.a_mat.cols() != n || q.gamma_mat.rows() != n)
        throw DimensionError("RiccatiProblem: operator dimensions disagree");
    if (!f.is_symmetric()) throw CertificateError("RiccatiProblem: F must be symmetric");
    return RiccatiProblem{std::move(l), std::move(q), std::move(f)};
}

double riccati_residual(const RiccatiProblem& prob, const HsOperator& p) {
    prob.F.require_same_triplet(p);
    return residual_mat(prob.L.a_mat, prob.Q.gamma_mat, prob.F.mat(), p.mat()).norm();
}

std::vector<double> geometric_schedule(double start, double ratio, int count) {
    if (!(start > 0.0) || !(ratio > 0.0) || ratio >= 1.0 || count < 1)
        throw ConfigError("geometric_schedule: need start > 0, 0 < ratio < 1, count >= 1");
    std::vector<double> s(count);
    double v = start;
    for (int k = 0; k < count; ++k, v *= ratio) s[k] = v;
    return s;
}

std::vector<double> half_power_schedule(int kmax) {
    if (kmax < 0) throw ConfigError("half_power_schedule: kmax must be >= 0");
    std::vector<double> s(kmax + 1);
    for (int k = 0; k <= kmax; ++k) s[k] = std::pow(10.0, -0.5 * k);
    return s;
}

SolverConfig SolverConfig::defaults() {
    SolverConfig cfg;
    cfg.lambda_schedule = geometric_schedule(1.0, 0.5, 20);
    cfg.omega_schedule = half_power_schedule(12);
    return cfg;
}

void SolverConfig::validate() const {
    auto check = [](const std::vector<double>& s, const char* name) {
        if (s.empty()) throw ConfigError(std::string(name) + ": empty schedule");
        double prev = std::numeric_limits<double>::infinity();
        for (double v : s) {
            if (!(v > 0.0) || !(v < prev))
                throw ConfigError(std::string(name) +
                                  ": schedule must be strictly decreasing and positive");
            prev = v;
        }
    };
    check(lambda_schedule, "lambda_schedule");
    check(omega_schedule, "omega_schedule");
    if (!(fp_tol > 0.0) || !(cauchy_tol > 0.0) || !(residual_tol > 0.0))
        throw ConfigError("SolverConfig: tolerances must be positive");
    if (max_fp_iter < 1 || max_outer < 1)
        throw ConfigError("SolverConfig: iteration caps must be positive");
}

SolutionReport solve_coercive(const RiccatiProblem& prob, const SolverConfig& cfg,
                              const HsOperator* warm_start) {
    cfg.validate();
    const SpectralTriplet& t = prob.triplet();
    const int n = t.dim();
    if (!(prob.L.omega > 0.0))
        throw CertificateError("solve_coercive: needs a certified coercivity constant omega > 0");
    // re-verify the certificate; a stale omega would invalidate the contraction check
    LyapunovOperator::certified(prob.L.a_mat, t, prob.L.omega);
    if (min_sym_eig(HsOperator(prob.F.triplet_ptr(), prob.Q.gamma_mat)) <
        -kPsdTol * (1.0 + prob.Q.gamma_mat.norm()))
        throw CertificateError("solve_coercive: Gamma must be PSD");
    if (!prob.F.is_psd(kPsdTol * (1.0 + prob.F.mat().norm())))
        throw CertificateError("solve_coercive: F must be PSD");

    const Eigen::MatrixXd& a = prob.L.a_mat;
    const Eigen::MatrixXd& g = prob.Q.gamma_mat;
    const Eigen::MatrixXd& f = prob.F.mat();
    const double fnorm = f.norm();
    const double c_paper = t.rho1() + 1.0 / t.kappa1();
    const double eq45_cap = prob.L.omega > 0.0
                                ? fnorm / (2.0 * prob.L.omega * t.rho_sq()[0])
                                : std::numeric_limits<double>::infinity();

    LyapunovResolvent rl(a);
    Eigen::MatrixXd p = warm_start ? Eigen::MatrixXd(0.5 * (warm_start->mat() +
                                                            warm_start->mat().transpose()))
                                   : Eigen::MatrixXd::Zero(n, n);
    double residual = residual_mat(a, g, f, p).norm();
    bool done = residual <= cfg.residual_tol;
    int extrapolation_order = 0;

    std::vector<StageRecord> history;
    StageRing ring;
    Eigen::MatrixXd prev_stage_p = p;
    bool eq45_ok = true;
    const int stages = std::min<int>(static_cast<int>(cfg.lambda_schedule.size()), cfg.max_outer);
    // per-stage target for the λ-regularized residual; the increment identity
    // ΔP = λ(I+λ𝓛)⁻¹(λ-residual) converts it into an increment threshold
    const double eps_stage = std::max(
        cfg.residual_tol / 20.0,
        100.0 * std::numeric_limits<double>::epsilon() * (1.0 + fnorm));

    int prev_stage_iters = 0;
    int saturation = 0;
    double best_stage_residual = std::numeric_limits<double>::infinity();

    for (int k = 0; k < stages && !done; ++k) {
        const double lam = cfg.lambda_schedule[k];
        const double theoretical = 1.0 / (1.0 + lam * prob.L.omega * c_paper);
        const double inc_stop = std::max(cfg.fp_tol, 0.3 * lam * eps_stage);
        // Beyond the useful continuation window the contraction rate
        // degenerates like 1/λ; a soft budget keeps such stages from burning
        // the global iteration cap (under-converged stages are harmless: the
        // residual certificate is recomputed independently).
        const int step_budget =
            k == 0 ? cfg.max_fp_iter
                   : std::min(cfg.max_fp_iter, std::max(5000, 5 * prev_stage_iters));
        int iters = 0;
        double observed = kNan;
        double prev_inc = kNan;
        int stalls = 0;
        Eigen::MatrixXd warm = p;
        while (true) {
            if (iters >= cfg.max_fp_iter)
                throw ConvergenceError("solve_coercive: fixed point exceeded max_fp_iter at "
                                       "lambda = " + sci(lam),
                                       residual);
            if (iters >= step_budget) break;
            QuadResolventInfo qinfo;
            // resolvent errors enter the Yosida map divided by λ
            const HsOperator rb =
                quadratic_resolvent(HsOperator(prob.F.triplet_ptr(), p), lam, prob.Q, &qinfo,
                                    &warm, 0.1 * lam * eps_stage);
            warm = rb.mat();
            Eigen::MatrixXd tp = rl.solve(lam * f + rb.mat(), lam);
            tp = 0.5 * (tp + tp.transpose()).eval();
            const double inc = (tp - p).norm();
            p.swap(tp);
            ++iters;
            residual = residual_mat(a, g, f, p).norm();
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + p.norm());
            if (std::isfinite(prev_inc) && prev_inc > noise && inc > noise) {
                const double ratio = inc / prev_inc;
                observed = std::isnan(observed) ? ratio : std::max(observed, ratio);
            }
            if (residual <= cfg.residual_tol) {
                done = true;
                extrapolation_order = 0;
                break;
            }
            if (inc <= inc_stop) break;
            // roundoff floor: increments stopped decreasing at noise level
            if (std::isfinite(prev_inc) && inc >= prev_inc && inc <= 1e3 * noise) {
                if (++stalls >= 3) break;
            } else {
                stalls = 0;
            }
            prev_inc = inc;
        }
        if (std::isfinite(observed) && observed > 1.1 * theoretical)
            throw ContractionError(
                "solve_coercive: observed contraction " + sci(observed) +
                " exceeds 1.1x theoretical " + sci(theoretical) +
                " at lambda = " + sci(lam) + " (bad coercivity certificate?)");
        const double gap = (p - prev_stage_p).norm();
        prev_stage_p = p;
        prev_stage_iters = iters;
        if (p.norm() > eq45_cap * (1.0 + 1e-6) + 1e-14) eq45_ok = false;
        history.push_back({lam, iters, observed, theoretical, gap, residual, p.norm()});
        ring.push(lam, p);
        if (done) break;
        // Richardson extrapolation through the last stage solutions, accepted
        // only if the recomputed residual certifies it.
        double stage_best = residual;
        for (const auto& [order, cand] : ring.candidates()) {
            Eigen::MatrixXd x = 0.5 * (cand + cand.transpose());
            double rx = residual_mat(a, g, f, x).norm();
            stage_best = std::min(stage_best, rx);
            if (rx <= cfg.residual_tol && rx < residual) {
                if (min_sym_eig(HsOperator(prob.F.triplet_ptr(), x)) < -1e-9) {
                    x = clamp_psd(x);
                    rx = residual_mat(a, g, f, x).norm();
                    if (!(rx <= cfg.residual_tol && rx < residual)) continue;
                }
                p = x;
                residual = rx;
                extrapolation_order = order;
                done = true;
            }
        }
        if (!done && gap <= cfg.cauchy_tol && residual <= cfg.residual_tol) done = true;
        if (!done && k >= 3) {
            // stop grinding once neither the stages nor the extrapolants improve;
            // the λ-continuation transiently worsens the true residual, so only
            // stage-era bests are compared
            saturation = stage_best >= 0.95 * best_stage_residual ? saturation + 1 : 0;
            if (saturation >= 3)
                throw ConvergenceError(
                    "solve_coercive: continuation saturated at residual " +
                        sci(best_stage_residual) + " above the target " + sci(cfg.residual_tol),
                    best_stage_residual);
        }
        best_stage_residual = std::min(best_stage_residual, stage_best);
    }

    if (!done && residual > cfg.residual_tol)
        throw ConvergenceError("solve_coercive: lambda schedule exhausted with residual " +
                               sci(residual),
                               residual);

    check_solution_shape(p);
    HsOperator sol(prob.F.triplet_ptr(), p);
    const double mineig = min_sym_eig(sol);
    if (mineig < -1e-9)
        throw BoundViolationError("solve_coercive: solution not PSD (min eigenvalue " +
                                  sci(mineig) + ")");
    SolutionReport report{std::move(sol), residual, mineig, std::move(history), {}, "coercive",
                          true, extrapolation_order};
    report.bounds_checklist["residual_certificate"] = residual <= cfg.residual_tol;
    report.bounds_checklist["symmetry"] = true;
    report.bounds_checklist["psd"] = true;
    report.bounds_checklist["eq45_norm_bound"] = eq45_ok;
    report.bounds_checklist["contraction_within_theory"] = true;  // enforced above
    return report;
}

SolutionReport solve_noncoercive(const RiccatiProblem& prob, const SolverConfig& cfg) {
    cfg.validate();
    const SpectralTriplet& t = prob.triplet();
    const int n = t.dim();
    const Eigen::MatrixXd& a = prob.L.a_mat;
    const Eigen::MatrixXd& g = prob.Q.gamma_mat;
    const Eigen::MatrixXd& f = prob.F.mat();

    // Hypotheses of the noncoercive theorem.
    const Eigen::MatrixXd sym_a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esa(sym_a, Eigen::EigenvaluesOnly);
    if (esa.eigenvalues().minCoeff() < -1e-10 * (1.0 + a.norm()))
        throw HypothesesError("solve_noncoercive: sym(A) must be PSD");
    double g0;
    if (prob.Q.g0) {
        g0 = *prob.Q.g0;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esg(g, Eigen::EigenvaluesOnly);
        g0 = esg.eigenvalues().minCoeff();
    }
    if (!(g0 > 0.0))
        throw HypothesesError("solve_noncoercive: Gamma must be coercive (g0 > 0)");
    const double f_min_eig = min_sym_eig(prob.F);
    if (!(f_min_eig > 0.0))
        throw HypothesesError("solve_noncoercive: F = C1*C1 must have trivial kernel");

    const Eigen::VectorXd d = t.rho_sq();
    // a-priori bound constants: ‖C₁‖_𝓗² = tr(F), ‖C₁‖_{(V′,H)}² = tr(diag(ρ²)F)
    const double bound_hh = std::sqrt(f.trace()) / std::sqrt(g0);
    const double bound_v = 2.0 * std::sqrt((d.asDiagonal() * f).trace()) / std::sqrt(g0);

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    std::vector<StageRecord> history;
    StageRing ring;
    bool done = false;
    int extrapolation_order = 0;
    double residual0 = f.norm();
    const int stages = std::min<int>(static_cast<int>(cfg.omega_schedule.size()), cfg.max_outer);

    // The inner continuation depth it may need varies with the per-stage
    // residual target, so extend the λ-schedule geometrically up to max_outer
    // entries; inner stages stop early on their residual anyway.
    std::vector<double> inner_lambda = cfg.lambda_schedule;
    {
        double ratio = 0.5;
        const size_t m = cfg.lambda_schedule.size();
        if (m >= 2) ratio = cfg.lambda_schedule[m - 1] / cfg.lambda_schedule[m - 2];
        while (static_cast<int>(inner_lambda.size()) < cfg.max_outer)
            inner_lambda.push_back(inner_lambda.back() * ratio);
    }

    for (int k = 0; k < stages && !done; ++k) {
        const double omega = cfg.omega_schedule[k];
        Eigen::MatrixXd a_omega = a;
        a_omega += (omega * d).asDiagonal();
        // certificate sym(a_ω) − ω diag(ρ²) = sym(a) ⪰ 0 holds by construction
        LyapunovOperator l_omega{std::move(a_omega), omega};
        RiccatiProblem stage_prob{l_omega, prob.Q, prob.F};

        // Inner residual target: a quarter of this stage's expected ω-bias
        // ‖ω(JP + PJ)‖; resolving deeper than the bias buys nothing.
        double bias_est;
        if (k == 0) {
            Eigen::VectorXd gamma0(n);
            for (int j = 0; j < n; ++j) {
                const double aj = l_omega.a_mat(j, j);
                const double gj = std::max(g(j, j), 1e-30);
                gamma0[j] = (-aj + std::sqrt(aj * aj + gj * std::max(f(j, j), 0.0))) / gj;
            }
            bias_est = 2.0 * omega * (d.cwiseProduct(gamma0)).norm();
        } else {
            bias_est = omega * (d.asDiagonal() * p + p * d.asDiagonal()).norm();
        }
        SolverConfig inner = cfg;
        inner.lambda_schedule = inner_lambda;
        inner.residual_tol = std::max(0.3 * cfg.residual_tol, 0.25 * bias_est);

        const HsOperator warm(prob.F.triplet_ptr(), p);
        SolutionReport stage = solve_coercive(stage_prob, inner, &warm);
        const Eigen::MatrixXd p_prev = p;
        p = stage.P.mat();

        const double p_hh = p.norm();
        if (p_hh > bound_hh * (1.0 + 1e-9) + 1e-12)
            throw BoundViolationError(
                "solve_noncoercive: Eq. 55 bound violated (" + sci(p_hh) + " > " +
                sci(bound_hh) + "); implementation fault");
        const double p_v = vnorm(stage.P);
        if (p_v > bound_v * (1.0 + 1e-9) + 1e-12)
            throw BoundViolationError(
                "solve_noncoercive: Eq. 55-3 V-norm estimate exceeded (" + sci(p_v) +
                " > " + sci(bound_v) +
                "); the estimate comes from the diagonal construction and can fail for "
                "strongly nonnormal A");

        residual0 = residual_mat(a, g, f, p).norm();
        int inner_iters = 0;
        for (const StageRecord& r : stage.history) inner_iters += r.iterations;
        const double gap = k == 0 ? kNan : (p - p_prev).norm();
        history.push_back({omega, inner_iters, kNan, 1.0, gap, residual0, p_hh});
        ring.push(omega, p);
        // The recomputed ω = 0 residual governs; the Cauchy gap is recorded.
        if (residual0 <= cfg.residual_tol) {
            done = true;
            extrapolation_order = 0;
            break;
        }
        // ω-Richardson through the stage solutions, certified by the ω = 0
        // residual on acceptance.
        for (const auto& [order, cand] : ring.candidates()) {
            Eigen::MatrixXd x = 0.5 * (cand + cand.transpose());
            double rx = residual_mat(a, g, f, x).norm();
            if (rx <= cfg.residual_tol && rx < residual0) {
                if (min_sym_eig(HsOperator(prob.F.triplet_ptr(), x)) < -1e-9) {
                    x = clamp_psd(x);
                    rx = residual_mat(a, g, f, x).norm();
                    if (!(rx <= cfg.residual_tol && rx < residual0)) continue;
                }
                const double x_hh = x.norm();
                if (x_hh > bound_hh * (1.0 + 1e-9) + 1e-12) continue;  // keep Eq. 55 certified
                p = x;
                residual0 = rx;
                extrapolation_order = order;
                done = true;
            }
        }
    }

    if (!done)
        throw ConvergenceError("solve_noncoercive: omega schedule exhausted with residual " +
                               sci(residual0),
                               residual0);

    check_solution_shape(p);
    HsOperator sol(prob.F.triplet_ptr(), p);
    const double mineig = min_sym_eig(sol);
    if (mineig < -1e-9)
        throw BoundViolationError("solve_noncoercive: solution not PSD");

    // Stage gaps decay geometrically once ω passes the knee set by the scales
    // of A and ΓP; assert monotone decrease past the peak.
    bool gaps_monotone = true;
    if (history.size() > 2) {
        size_t peak = 1;
        for (size_t i = 2; i < history.size(); ++i)
            if (history[i].stage_gap > history[peak].stage_gap) peak = i;
        for (size_t i = peak + 1; i < history.size(); ++i)
            if (history[i].stage_gap > history[i - 1].stage_gap * (1.0 + 1e-9) + 1e-15)
                gaps_monotone = false;
    }

    SolutionReport report{std::move(sol), residual0, mineig, std::move(history), {},
                          "noncoercive", true, extrapolation_order};
    report.bounds_checklist["residual_certificate"] = residual0 <= cfg.residual_tol;
    report.bounds_checklist["symmetry"] = true;
    report.bounds_checklist["psd"] = true;
    report.bounds_checklist["eq55_bound"] = true;    // enforced per stage above
    report.bounds_checklist["eq55_3_bound"] = true;  // enforced per stage above
    report.bounds_checklist["stage_gaps_post_peak_monotone"] = gaps_monotone;
    return report;
}

HsOperator newton_kleinman_oracle(const RiccatiProblem& prob, const HsOperator* p0, double tol,
                                  int max_iter) {
    const int n = prob.triplet().dim();
    const Eigen::MatrixXd& a = prob.L.a_mat;
    const Eigen::MatrixXd& g = prob.Q.gamma_mat;
    const Eigen::MatrixXd& f = prob.F.mat();

    Eigen::MatrixXd p;
    if (p0) {
        p = 0.5 * (p0->mat() + p0->mat().transpose());
    } else {
        const Eigen::MatrixXd sym_a = 0.5 * (a + a.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym_a, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > 0.0) {
            p = Eigen::MatrixXd::Zero(n, n);  // A itself already stabilizes
        } else {
            // diagonal scalar closed forms as the stabilizing seed
            Eigen::VectorXd gamma(n);
            for (int j = 0; j < n; ++j) {
                const double aj = a(j, j);
                const double gj = std::max(g(j, j), 1e-12);
                gamma[j] = (-aj + std::sqrt(aj * aj + gj * std::max(f(j, j), 0.0))) / gj;
            }
            p = gamma.asDiagonal();
        }
    }

    const double tol_abs = tol * std::max(1.0, f.norm());
    Eigen::MatrixXd resid = residual_mat(a, g, f, p);
    double rnorm = resid.norm();
    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= tol_abs) return HsOperator(prob.F.triplet_ptr(), p);
        const Eigen::MatrixXd m = a + g * p;
        // dense Kronecker system (I ⊗ Mᵀ + Mᵀ ⊗ I) vec(Δ) = −vec(G)
        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n * n, n * n);
        for (int b = 0; b < n; ++b)
            sys.block(b * n, b * n, n, n) += m.transpose();
        for (int br = 0; br < n; ++br)
            for (int bc = 0; bc < n; ++bc)
                sys.block(br * n, bc * n, n, n).diagonal().array() += m(bc, br);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
        const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(resid.data(), n * n);
        const Eigen::VectorXd dvec = lu.solve(rhs);
        if (!(dvec.allFinite()) || (sys * dvec - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
            throw SingularSystemError("newton_kleinman_oracle: singular linearization");
        Eigen::MatrixXd step = Eigen::Map<const Eigen::MatrixXd>(dvec.data(), n, n);
        step = 0.5 * (step + step.transpose()).eval();

        double alpha = 1.0;
        Eigen::MatrixXd pnext, rnext;
        double rnext_norm = rnorm;
        while (alpha >= 1e-10) {
            pnext = p + alpha * step;
            rnext = residual_mat(a, g, f, pnext);
            rnext_norm = rnext.norm();
            if (rnext_norm < rnorm || rnext_norm <= tol_abs) break;
            alpha *= 0.5;
        }
        if (alpha < 1e-10)
            throw ConvergenceError("newton_kleinman_oracle: line search stalled", rnorm);
        p.swap(pnext);
        resid.swap(rnext);
        rnorm = rnext_norm;
    }
    if (rnorm <= tol_abs) return HsOperator(prob.F.triplet_ptr(), p);
    throw ConvergenceError("newton_kleinman_oracle: divergence", rnorm);
}

UniquenessRecord uniqueness_probe(const RiccatiProblem& prob, const HsOperator& p1,
                                  const HsOperator& p2) {
    p1.require_same_triplet(p2);
    const int n = prob.triplet().dim();
    auto offdiag_small = [&](const Eigen::MatrixXd& m) {
        Eigen::MatrixXd off = m;
        off.diagonal().setZero();
        return off.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.norm());
    };
    UniquenessRecord rec;
    rec.gap_hh = (p1.mat() - p2.mat()).norm();
    rec.diagonal_instance = offdiag_small(prob.L.a_mat) && offdiag_small(prob.Q.gamma_mat) &&
                            offdiag_small(prob.F.mat()) && offdiag_small(p1.mat()) &&
                            offdiag_small(p2.mat());
    if (rec.diagonal_instance) {
        rec.eigen_gap.resize(n);
        rec.uniqueness_factor.resize(n);
        for (int j = 0; j < n; ++j) {
            const double g1 = p1.mat()(j, j), g2 = p2.mat()(j, j);
            rec.eigen_gap[j] = g1 - g2;
            rec.uniqueness_factor[j] =
                2.0 * prob.L.a_mat(j, j) + (g1 + g2) * prob.Q.gamma_mat(j, j);
        }
    }
    return rec;
}

}  // namespace hsricc
