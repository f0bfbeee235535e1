#include "hsricc/resolvents.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace hsricc {

namespace detail {

// Quasi-triangular sweep for Tᵀ Y + Y T = C with T upper quasi-triangular.
static Eigen::MatrixXd solve_schur_form(const Eigen::MatrixXd& t, const Eigen::MatrixXd& c) {
    const int n = static_cast<int>(t.rows());
    // Diagonal block boundaries of the real Schur form (1x1 or 2x2).
    std::vector<int> start;
    for (int i = 0; i < n;) {
        start.push_back(i);
        i += (i + 1 < n && t(i + 1, i) != 0.0) ? 2 : 1;
    }
    const int nb = static_cast<int>(start.size());
    auto size_of = [&](int k) { return (k + 1 < nb ? start[k + 1] : n) - start[k]; };

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
    const double tscale = t.cwiseAbs().maxCoeff() + 1.0;
    for (int bj = 0; bj < nb; ++bj) {
        const int j0 = start[bj], nj = size_of(bj);
        for (int bi = 0; bi < nb; ++bi) {
            const int i0 = start[bi], ni = size_of(bi);
            Eigen::MatrixXd rhs = c.block(i0, j0, ni, nj);
            if (i0 > 0) rhs -= t.block(0, i0, i0, ni).transpose() * y.block(0, j0, i0, nj);
            if (j0 > 0) rhs -= y.block(i0, 0, ni, j0) * t.block(0, j0, j0, nj);

            const Eigen::MatrixXd tii = t.block(i0, i0, ni, ni);
            const Eigen::MatrixXd tjj = t.block(j0, j0, nj, nj);
            const int m = ni * nj;
            Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
            // vec(Tiiᵀ Y) = (I ⊗ Tiiᵀ) vec(Y), vec(Y Tjj) = (Tjjᵀ ⊗ I) vec(Y)
            for (int q = 0; q < nj; ++q)
                sys.block(q * ni, q * ni, ni, ni) += tii.transpose();
            for (int q = 0; q < nj; ++q)
                for (int r = 0; r < nj; ++r)
                    sys.block(q * ni, r * ni, ni, ni) +=
                        tjj(r, q) * Eigen::MatrixXd::Identity(ni, ni);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
            lu.setThreshold(1e-13 * tscale);
            if (lu.rank() < m)
                throw SingularSystemError(
                    "lyapunov solve: eigenvalue pairing makes the system singular");
            const Eigen::VectorXd sol =
                lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), m));
            y.block(i0, j0, ni, nj) = Eigen::Map<const Eigen::MatrixXd>(sol.data(), ni, nj);
        }
    }
    return y;
}

Eigen::MatrixXd solve_lyapunov_general(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
    Eigen::RealSchur<Eigen::MatrixXd> schur(a);
    if (schur.info() != Eigen::Success)
        throw SingularSystemError("lyapunov solve: Schur factorization failed");
    const Eigen::MatrixXd& u = schur.matrixU();
    const Eigen::MatrixXd y = solve_schur_form(schur.matrixT(), u.transpose() * c * u);
    return u * y * u.transpose();
}

void sym_eig_descending(const Eigen::MatrixXd& m, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw Error("sym_eig_descending: eigensolver failed");
    const int n = static_cast<int>(m.rows());
    vals.resize(n);
    vecs.resize(n, n);
    for (int j = 0; j < n; ++j) {  // ascending -> descending
        vals[j] = es.eigenvalues()[n - 1 - j];
        vecs.col(j) = es.eigenvectors().col(n - 1 - j);
    }
    for (int j = 0; j < n; ++j) {
        const double vmax = vecs.col(j).cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i) {
            if (std::abs(vecs(i, j)) > 1e-12 * vmax) {
                if (vecs(i, j) < 0.0) vecs.col(j) = -vecs.col(j);
                break;
            }
        }
    }
}

}  // namespace detail

LyapunovOperator LyapunovOperator::certified(Eigen::MatrixXd a, const SpectralTriplet& triplet,
                                             double omega, double tol) {
    if (a.rows() != triplet.dim() || a.cols() != triplet.dim())
        throw DimensionError("LyapunovOperator: a_mat does not match triplet dimension");
    if (omega < 0.0) throw CertificateError("LyapunovOperator: omega must be >= 0");
    if (omega > 0.0) {
        const Eigen::MatrixXd cert = 0.5 * (a + a.transpose()) -
                                     omega * Eigen::MatrixXd(triplet.rho_sq().asDiagonal());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert, Eigen::EigenvaluesOnly);
        const double scale = 1.0 + a.norm();
        if (es.eigenvalues().minCoeff() < -tol * scale)
            throw CertificateError("LyapunovOperator: coercivity certificate sym(A) - omega*J "
                                   "fails (min eigenvalue " +
                                   std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    return LyapunovOperator{std::move(a), omega};
}

double LyapunovOperator::coercivity_constant(const Eigen::MatrixXd& a,
                                             const SpectralTriplet& triplet) {
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    const Eigen::MatrixXd d = triplet.rho_sq().asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, d, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("coercivity_constant: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

QuadraticOperator QuadraticOperator::checked(Eigen::MatrixXd gamma, std::optional<double> g0,
                                             double tol) {
    const double dev = (gamma - gamma.transpose()).cwiseAbs().maxCoeff();
    if (dev > tol * (1.0 + gamma.norm()))
        throw CertificateError("QuadraticOperator: gamma_mat is not symmetric");
    gamma = 0.5 * (gamma + gamma.transpose()).eval();
    if (g0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < *g0 - tol * (1.0 + gamma.norm()))
            throw CertificateError("QuadraticOperator: claimed lower bound g0 fails");
    }
    return QuadraticOperator{std::move(gamma), g0};
}

LyapunovResolvent::LyapunovResolvent(const Eigen::MatrixXd& a_mat) {
    symmetric_ = (a_mat - a_mat.transpose()).cwiseAbs().maxCoeff() <=
                 kSymTol * (1.0 + a_mat.norm());
    if (symmetric_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a_mat + a_mat.transpose()));
        if (es.info() != Eigen::Success)
            throw Error("LyapunovResolvent: eigensolver failed");
        q_ = es.eigenvectors();
        mu_ = es.eigenvalues();
    } else {
        Eigen::RealSchur<Eigen::MatrixXd> schur(a_mat);
        if (schur.info() != Eigen::Success)
            throw SingularSystemError("LyapunovResolvent: Schur factorization failed");
        u_ = schur.matrixU();
        t_ = schur.matrixT();
    }
}

Eigen::MatrixXd LyapunovResolvent::solve(const Eigen::MatrixXd& f, double lambda) const {
    if (!(lambda > 0.0)) throw CertificateError("LyapunovResolvent: lambda must be > 0");
    if (symmetric_) {
        const Eigen::MatrixXd fhat = q_.transpose() * f * q_;
        const int n = static_cast<int>(mu_.size());
        Eigen::MatrixXd phat(n, n);
        const double floor = 1e-14 * (1.0 + lambda * 2.0 * mu_.cwiseAbs().maxCoeff());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double den = 1.0 + lambda * (mu_[i] + mu_[j]);
                if (std::abs(den) < floor)
                    throw SingularSystemError("lyapunov resolvent: singular spectral shift");
                phat(i, j) = fhat(i, j) / den;
            }
        }
        return q_ * phat * q_.transpose();
    }
    // P + λ(AᵀP + PA) = F  ⇔  ÃᵀP + PÃ = F/λ with Ã = A + I/(2λ); the Schur
    // factor of Ã is the stored one with a shifted diagonal.
    Eigen::MatrixXd tshift = t_;
    tshift.diagonal().array() += 0.5 / lambda;
    const Eigen::MatrixXd chat = u_.transpose() * (f / lambda) * u_;
    const Eigen::MatrixXd y = detail::solve_schur_form(tshift, chat);
    return u_ * y * u_.transpose();
}

HsOperator lyapunov_resolvent(const HsOperator& f, double lambda, const LyapunovOperator& l) {
    if (!(lambda > 0.0)) throw CertificateError("lyapunov_resolvent: lambda must be > 0");
    if (!f.is_symmetric())
        throw CertificateError("lyapunov_resolvent: F must be symmetric");
    if (l.a_mat.rows() != f.dim())
        throw DimensionError("lyapunov_resolvent: dimension mismatch");
    LyapunovResolvent solver(l.a_mat);
    Eigen::MatrixXd p = solver.solve(f.mat(), lambda);
    p = 0.5 * (p + p.transpose()).eval();
    const Eigen::MatrixXd res =
        p + lambda * (l.a_mat.transpose() * p + p * l.a_mat) - f.mat();
    if (res.norm() > kLinTol * (1.0 + f.mat().norm()))
        throw SingularSystemError("lyapunov_resolvent: residual " + std::to_string(res.norm()) +
                                  " exceeds tolerance (system nearly singular)");
    return HsOperator(f.triplet_ptr(), std::move(p));
}

namespace {

// Per-mode root of λ g γ² + γ − γ_F = 0 in the numerically stable form
// γ = 2γ_F / (1 + √(1 + 4λ g γ_F)); reduces to γ_F when g = 0.
double quadratic_root(double lambda, double g, double gamma_f, double g_floor) {
    if (g <= g_floor) return gamma_f;
    const double disc = 1.0 + 4.0 * lambda * g * gamma_f;
    if (disc < 0.0)
        throw CertificateError("quadratic_resolvent: F is not PSD (negative discriminant)");
    return 2.0 * gamma_f / (1.0 + std::sqrt(disc));
}

}  // namespace

HsOperator quadratic_resolvent(const HsOperator& f, double lambda, const QuadraticOperator& q,
                               QuadResolventInfo* info, const Eigen::MatrixXd* warm_start,
                               double target_residual) {
    if (!(lambda > 0.0)) throw CertificateError("quadratic_resolvent: lambda must be > 0");
    if (!f.is_symmetric())
        throw CertificateError("quadratic_resolvent: F must be symmetric");
    const Eigen::MatrixXd& fm = f.mat();
    const Eigen::MatrixXd& g = q.gamma_mat;
    if (g.rows() != f.dim())
        throw DimensionError("quadratic_resolvent: dimension mismatch");
    const double fnorm = fm.norm();
    const double gnorm = g.norm();
    QuadResolventInfo local;
    QuadResolventInfo& out = info ? *info : local;

    if (gnorm == 0.0) {
        out = {QuadResolventInfo::Path::ClosedForm, 0, 0.0, 1.0};
        return f;
    }

    const double comm = (g * fm - fm * g).norm();
    const double g_floor = 1e-14 * gnorm;
    const double tol = kQuadTol * (1.0 + fnorm);
    const double mach_floor = 30.0 * std::numeric_limits<double>::epsilon() * (1.0 + fnorm);
    const double newton_target =
        std::max(mach_floor,
                 std::min(target_residual > 0.0 ? target_residual : 0.01 * tol, tol));

    if (comm <= kCommTolFactor * gnorm * fnorm) {
        // Γ and F commute: eigen-expand F, rotate within repeated-eigenvalue
        // blocks to diagonalize Γ there too, then apply the per-mode roots.
        Eigen::VectorXd fvals;
        Eigen::MatrixXd v;
        detail::sym_eig_descending(fm, fvals, v);
        Eigen::MatrixXd ghat = v.transpose() * g * v;
        const int n = f.dim();
        const double group_tol = 1e-10 * (1.0 + fvals.cwiseAbs().maxCoeff());
        int b = 0;
        while (b < n) {
            int e = b + 1;
            while (e < n && std::abs(fvals[e] - fvals[b]) <= group_tol) ++e;
            if (e - b > 1) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                    ghat.block(b, b, e - b, e - b));
                v.middleCols(b, e - b) = (v.middleCols(b, e - b) * es.eigenvectors()).eval();
            }
            b = e;
        }
        ghat = v.transpose() * g * v;
        // Fall back to Newton if the off-diagonal part did not vanish (F and Γ
        // only nearly commute).
        Eigen::MatrixXd offdiag = ghat;
        offdiag.diagonal().setZero();
        if (offdiag.cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + gnorm)) {
            Eigen::VectorXd gamma(n);
            for (int j = 0; j < n; ++j)
                gamma[j] = quadratic_root(lambda, std::max(ghat(j, j), 0.0), fvals[j], g_floor);
            Eigen::MatrixXd p = v * gamma.asDiagonal() * v.transpose();
            p = 0.5 * (p + p.transpose()).eval();
            out.path = QuadResolventInfo::Path::ClosedForm;
            out.newton_iterations = 0;
            out.residual = (p + lambda * p * g * p - fm).norm();
            out.norm_ratio = fnorm > 0.0 ? p.norm() / fnorm : 0.0;
            if (out.residual > tol)
                throw ConvergenceError("quadratic_resolvent: closed form residual too large",
                                       out.residual);
            return HsOperator(f.triplet_ptr(), std::move(p));
        }
    }

    // General path: damped Newton on G(P) = P + λPΓP − F = 0, iterates kept
    // symmetric. Each step solves SᵀΔ + ΔS = −G with S = λΓP + I/2.
    Eigen::MatrixXd p;
    if (warm_start && warm_start->rows() == fm.rows()) {
        p = 0.5 * (*warm_start + warm_start->transpose());
    } else {
        Eigen::VectorXd fvals;
        Eigen::MatrixXd v;
        detail::sym_eig_descending(fm, fvals, v);
        const Eigen::MatrixXd ghat = v.transpose() * g * v;
        Eigen::VectorXd gamma(f.dim());
        for (int j = 0; j < f.dim(); ++j)
            gamma[j] = quadratic_root(lambda, std::max(ghat(j, j), 0.0), fvals[j], g_floor);
        p = v * gamma.asDiagonal() * v.transpose();
        p = 0.5 * (p + p.transpose()).eval();
    }

    const int max_newton = 100;
    Eigen::MatrixXd resid = p + lambda * p * g * p - fm;
    double rnorm = resid.norm();
    int it = 0;
    for (; it < max_newton && rnorm > newton_target; ++it) {
        const Eigen::MatrixXd s = lambda * (g * p) + 0.5 * Eigen::MatrixXd::Identity(
                                                               f.dim(), f.dim());
        Eigen::MatrixXd step = detail::solve_lyapunov_general(s, -resid);
        step = 0.5 * (step + step.transpose()).eval();
        double alpha = 1.0;
        Eigen::MatrixXd pnext;
        Eigen::MatrixXd rnext;
        double rnext_norm = rnorm;
        while (alpha >= 1e-8) {
            pnext = p + alpha * step;
            pnext = 0.5 * (pnext + pnext.transpose()).eval();
            rnext = pnext + lambda * pnext * g * pnext - fm;
            rnext_norm = rnext.norm();
            if (rnext_norm < (1.0 - 1e-4 * alpha) * rnorm) break;
            alpha *= 0.5;
        }
        if (alpha < 1e-8) {
            if (rnorm <= tol) break;  // stalled at the roundoff floor but acceptable
            throw ConvergenceError("quadratic_resolvent: Newton stalled", rnorm);
        }
        p.swap(pnext);
        resid.swap(rnext);
        rnorm = rnext_norm;
    }
    if (rnorm > tol)
        throw ConvergenceError("quadratic_resolvent: Newton did not converge", rnorm);

    out.path = QuadResolventInfo::Path::Newton;
    out.newton_iterations = it;
    out.residual = rnorm;
    out.norm_ratio = fnorm > 0.0 ? p.norm() / fnorm : 0.0;
    // The monotone-resolvent branch satisfies 0 ⪯ P ⪯ F; a norm blow-up means
    // Newton left it.
    if (p.norm() > fnorm * (1.0 + 1e-9) + 1e-12)
        throw BoundViolationError("quadratic_resolvent: ‖P‖ exceeds ‖F‖ (wrong branch)");
    return HsOperator(f.triplet_ptr(), std::move(p));
}

HsOperator yosida(const HsOperator& p, double lambda, const QuadraticOperator& q) {
    QuadResolventInfo info;
    const HsOperator r = quadratic_resolvent(p, lambda, q, &info);
    const Eigen::MatrixXd y1 = (p.mat() - r.mat()) / lambda;
    const Eigen::MatrixXd y2 = r.mat() * q.gamma_mat * r.mat();
    // The two forms of Eq. 41-2 differ exactly by (resolvent residual)/λ.
    const double tol = 10.0 * (info.residual + 1e-14 * (1.0 + p.mat().norm())) / lambda +
                       1e-9 * (1.0 + y2.norm());
    if ((y1 - y2).norm() > tol)
        throw Error("yosida: the two forms of the approximation disagree");
    return HsOperator(p.triplet_ptr(), y1);
}

}  // namespace hsricc
