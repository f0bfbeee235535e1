#pragma once

#include <Eigen/Core>

#include <optional>

#include "hsricc/hs_operator.hpp"

namespace hsricc {

// Relative tolerances pinned for reproducible runs: the closed-form path of the
// quadratic resolvent is taken when ‖ΓF−FΓ‖ ≤ kCommTolFactor·‖Γ‖·‖F‖; linear and
// quadratic resolvent residuals are accepted below kLinTol / kQuadTol (relative).
inline constexpr double kCommTolFactor = 1e-12;
inline constexpr double kLinTol = 1e-10;
inline constexpr double kQuadTol = 1e-10;

// The Lyapunov part 𝓛(P) = A*P + PA, represented by a_mat(k,j) = ⟨A e_j, e_k⟩
// plus the coercivity constant ω of ⟨Ay,y⟩ ≥ ω‖y‖_V², certified as the matrix
// condition sym(a_mat) − ω·diag(ρ_j²) ⪰ 0.
struct LyapunovOperator {
    Eigen::MatrixXd a_mat;
    double omega = 0.0;  // certified constant; 0 means no coercivity claimed

    // Verifies the certificate sym(a) − ω·diag(ρ²) ⪰ −tol before accepting ω.
    static LyapunovOperator certified(Eigen::MatrixXd a, const SpectralTriplet& triplet,
                                      double omega, double tol = 1e-10);

    // Largest ω with sym(a) − ω·diag(ρ²) ⪰ 0 (may be negative if A is not
    // even H-monotone).
    static double coercivity_constant(const Eigen::MatrixXd& a, const SpectralTriplet& triplet);
};

// The quadratic part 𝓑(P) = PΓP, with gamma_mat = (Γe_j, e_k)_H symmetric and
// an optional certified lower spectral bound g₀ ((Γy,y) ≥ g₀‖y‖²).
struct QuadraticOperator {
    Eigen::MatrixXd gamma_mat;
    std::optional<double> g0;

    static QuadraticOperator checked(Eigen::MatrixXd gamma, std::optional<double> g0 = {},
                                     double tol = kPsdTol);
};

// Prefactored solver for P + λ(AᵀP + PA) = F: one Schur (or symmetric eigen)
// factorization of A, reused for every λ and right-hand side.
class LyapunovResolvent {
public:
    LyapunovResolvent(const Eigen::MatrixXd& a_mat);

    // Solves P + λ(AᵀP + PA) = F. Throws SingularSystemError if the shifted
    // spectrum makes the system singular (cannot happen for ω > 0).
    Eigen::MatrixXd solve(const Eigen::MatrixXd& f, double lambda) const;

private:
    bool symmetric_;
    Eigen::MatrixXd q_;       // eigenvectors (symmetric path)
    Eigen::VectorXd mu_;      // eigenvalues (symmetric path)
    Eigen::MatrixXd u_, t_;   // real Schur factors (general path)
};

// One-shot resolvent (I + λ𝓛)^{-1}F with residual verification.
HsOperator lyapunov_resolvent(const HsOperator& f, double lambda, const LyapunovOperator& l);

struct QuadResolventInfo {
    enum class Path { ClosedForm, Newton };
    Path path = Path::ClosedForm;
    int newton_iterations = 0;
    double residual = 0.0;       // ‖P + λPΓP − F‖_HH of the returned P
    double norm_ratio = 0.0;     // ‖P‖_HH / ‖F‖_HH (≤ 1 for the PSD branch)
};

// Resolvent (I + λ𝓑)^{-1}F, i.e. the symmetric PSD solution of P + λPΓP = F.
// Closed form (per-mode quadratic roots) when Γ and F commute; damped Newton on
// the matrix equation otherwise. `warm_start` seeds the Newton path.
// `target_residual` (when > 0) asks for a residual beyond the default
// acceptance tolerance — the Yosida map divides resolvent errors by λ, so
// continuation solvers need λ-scaled targets. Clamped at the roundoff floor;
// failing kQuadTol·(1+‖F‖) still raises ConvergenceError.
HsOperator quadratic_resolvent(const HsOperator& f, double lambda, const QuadraticOperator& q,
                               QuadResolventInfo* info = nullptr,
                               const Eigen::MatrixXd* warm_start = nullptr,
                               double target_residual = -1.0);

// Yosida approximation 𝓑_λ(P) = λ⁻¹(P − (I+λ𝓑)⁻¹P); checked against the
// equivalent form 𝓑((I+λ𝓑)⁻¹P).
HsOperator yosida(const HsOperator& p, double lambda, const QuadraticOperator& q);

namespace detail {

// Solves AᵀX + XA = C for general square A via real Schur of A and a blocked
// quasi-triangular sweep (Bartels–Stewart).
Eigen::MatrixXd solve_lyapunov_general(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

// Deterministic symmetric eigendecomposition: eigenvalues descending,
// eigenvector sign fixed so the first component of magnitude > 1e-12·max is
// positive.
void sym_eig_descending(const Eigen::MatrixXd& m, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs);

}  // namespace detail

}  // namespace hsricc
