#pragma once

// Test-only oracles, independent of the library's solution paths: naive
// double-sum HS norms, the dense Kronecker resolvent solve, finite-difference
// Newton root finding, quadrature, frequency responses, and the random
// instance generators shared by the property and acceptance suites.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hsricc/rng.hpp"
#include "hsricc/triplet.hpp"

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Solves P + lambda (A^T P + P A) = F as one dense n^2 x n^2 system.
inline MatrixXd kron_lyapunov_resolvent(const MatrixXd& a, double lambda, const MatrixXd& f) {
    const Eigen::Index n = a.rows();
    const MatrixXd eye = MatrixXd::Identity(n, n);
    const MatrixXd sys = kron(eye, eye) + lambda * (kron(eye, a.transpose()) + kron(a.transpose(), eye));
    const VectorXd rhs = Eigen::Map<const VectorXd>(f.data(), n * n);
    const VectorXd sol = sys.fullPivLu().solve(rhs);
    return Eigen::Map<const MatrixXd>(sol.data(), n, n);
}

// Naive double-sum versions of the five weighted HS norms.
inline double naive_hs_norm(const MatrixXd& m, const VectorXd& rho_sq, const char* kind) {
    const Eigen::Index n = m.rows();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double v = m(k, j) * m(k, j);
            if (std::string_view(kind) == "HH") acc += v;
            else if (std::string_view(kind) == "VdH") acc += rho_sq[j] * v;
            else if (std::string_view(kind) == "VH") acc += v / rho_sq[j];
            else if (std::string_view(kind) == "HV") acc += rho_sq[k] * v;
            else if (std::string_view(kind) == "HVd") acc += v / rho_sq[k];
            else throw std::invalid_argument("naive_hs_norm kind");
        }
    }
    return std::sqrt(acc);
}

// Damped Newton with a finite-difference Jacobian on a generic small system.
inline VectorXd fd_newton(const std::function<VectorXd(const VectorXd&)>& f, VectorXd x,
                          double tol = 1e-13, int max_iter = 200) {
    VectorXd r = f(x);
    for (int it = 0; it < max_iter; ++it) {
        if (r.norm() <= tol) return x;
        const Eigen::Index m = x.size();
        MatrixXd jac(r.size(), m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(x[j]));
            VectorXd xp = x;
            xp[j] += h;
            jac.col(j) = (f(xp) - r) / h;
        }
        const VectorXd step = jac.fullPivLu().solve(-r);
        double alpha = 1.0;
        while (alpha > 1e-12) {
            const VectorXd xn = x + alpha * step;
            const VectorXd rn = f(xn);
            if (rn.norm() < r.norm() || rn.norm() <= tol) {
                x = xn;
                r = rn;
                break;
            }
            alpha *= 0.5;
        }
        if (alpha <= 1e-12) throw std::runtime_error("fd_newton stalled");
    }
    if (r.norm() <= tol) return x;
    throw std::runtime_error("fd_newton did not converge");
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const auto simpson = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, int)> rec = [&](double lo, double hi,
                                                                 double whole, int d) {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid);
        const double right = simpson(mid, hi);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, simpson(a, b), depth);
}

// |c (i nu - atilde)^{-1} b|^2-style transfer gains for diagonal closed loops.
inline double scalar_transfer_gain_sq(double atilde, double b1, double c1, double feedback,
                                      double nu) {
    const std::complex<double> den(-atilde, nu);  // i nu - atilde
    const std::complex<double> g = b1 / den;
    const double y2 = std::norm(g);
    return (c1 * c1 + feedback * feedback) * y2;
}

// ---- random instance generators -------------------------------------------

inline MatrixXd random_matrix(hsricc::Rng& rng, int n, double scale = 1.0) {
    MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * rng.normal();
    return m;
}

inline MatrixXd random_orthogonal(hsricc::Rng& rng, int n) {
    const MatrixXd m = random_matrix(rng, n);
    Eigen::HouseholderQR<MatrixXd> qr(m);
    MatrixXd q = qr.householderQ();
    // fix signs for determinism of the construction
    const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

// symmetric PSD with eigenvalues in [lo, hi]
inline MatrixXd random_psd(hsricc::Rng& rng, int n, double lo, double hi) {
    const MatrixXd q = random_orthogonal(rng, n);
    VectorXd ev(n);
    for (int i = 0; i < n; ++i) ev[i] = rng.uniform(lo, hi);
    return q * ev.asDiagonal() * q.transpose();
}

inline MatrixXd random_symmetric(hsricc::Rng& rng, int n, double scale = 1.0) {
    const MatrixXd m = random_matrix(rng, n, scale);
    return 0.5 * (m + m.transpose());
}

inline MatrixXd random_skew(hsricc::Rng& rng, int n, double scale = 1.0) {
    const MatrixXd m = random_matrix(rng, n, scale);
    return 0.5 * (m - m.transpose());
}

// A with the certificate sym(A) - omega diag(rho_sq) >= 0 (built as
// omega*diag(rho_sq) + PSD + skew).
inline MatrixXd random_coercive_a(hsricc::Rng& rng, const VectorXd& rho_sq, double omega,
                                  double psd_scale = 0.5, double skew_scale = 0.5) {
    const int n = static_cast<int>(rho_sq.size());
    return omega * MatrixXd(rho_sq.asDiagonal()) + random_psd(rng, n, 0.0, psd_scale) +
           random_skew(rng, n, skew_scale);
}

}  // namespace oracles
