#pragma once

#include <Eigen/Core>

#include <optional>

#include "hsricc/triplet.hpp"

namespace hsricc {

// Default tolerances for the symmetry / positive-semidefiniteness flags.
// All positivity checks symmetrize first.
inline constexpr double kSymTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

// Which weighted Hilbert–Schmidt norm: (H,H), (V′,H), (H,V), (H,V′), (V,H).
enum class HsNormKind { HH, VdH, HV, HVd, VH };

// An operator on the truncated space, stored as its matrix in the basis {e_j}:
// mat(k, j) = (P e_j, e_k)_H, so column j is P e_j in H-coordinates and
// apply(P, y)_k = Σ_j mat(k, j) y_j.
class HsOperator {
public:
    HsOperator(TripletPtr triplet, Eigen::MatrixXd mat);

    static HsOperator zero(TripletPtr triplet);
    static HsOperator identity(TripletPtr triplet);
    static HsOperator diagonal(TripletPtr triplet, const Eigen::VectorXd& diag);

    const Eigen::MatrixXd& mat() const { return mat_; }
    const SpectralTriplet& triplet() const { return *triplet_; }
    const TripletPtr& triplet_ptr() const { return triplet_; }
    int dim() const { return triplet_->dim(); }

    VectorH apply(const VectorH& y) const;

    // Cached flags; computed on first use against kSymTol / kPsdTol.
    bool is_symmetric() const;
    bool is_psd(double tol = kPsdTol) const;

    void require_same_triplet(const HsOperator& other) const;

private:
    TripletPtr triplet_;
    Eigen::MatrixXd mat_;
    mutable std::optional<bool> symmetric_flag_;
    mutable std::optional<bool> psd_flag_;  // valid only for tol == kPsdTol
};

// Weighted HS norms:
//   HH  — Frobenius norm of mat
//   VdH — (Σ_j ρ_j² ‖P e_j‖_H²)^{1/2}
//   VH  — (Σ_j ρ_j⁻² ‖P e_j‖_H²)^{1/2}
//   HV  — (Σ_j ‖P e_j‖_V²)^{1/2}   (row weights ρ_k²)
//   HVd — (Σ_j ‖P e_j‖_{V′}²)^{1/2} (row weights ρ_k⁻²)
double hs_norm(const HsOperator& p, HsNormKind kind);

// ‖P‖_𝓥 = ‖P‖_{(V′,H)} + ‖P‖_{(H,V)} and ‖P‖_{𝓥′} = ‖P‖_{(H,V′)} + ‖P‖_{(V,H)}
// (sum convention exactly as printed).
double vnorm(const HsOperator& p);
double dual_norm(const HsOperator& p);

// Operator composition (P2 ∘ P1); HS-norm submultiplicative.
HsOperator compose(const HsOperator& p2, const HsOperator& p1);

// Adjoint (matrix transpose in the orthonormal H-basis).
HsOperator adjoint(const HsOperator& p);

// Smallest eigenvalue of (mat + matᵀ)/2.
double min_sym_eig(const HsOperator& p);

bool is_psd(const HsOperator& p, double tol = kPsdTol);

// Trace form (P, Q)_{H.S.} = Σ_j (P e_j, Q e_j)_H. The two dual-space pairings
// both reduce to this in coordinates.
double trace_pairing(const HsOperator& p, const HsOperator& q);

// Checks (P₂P₁, P₁) ≥ −tol and (P₁P₂, P₁) ≥ −tol for symmetric PSD P₂
// (HS property (d)). Throws CertificateError if P₂ is not symmetric PSD.
bool pairing_positivity_check(const HsOperator& p1, const HsOperator& p2, double tol = kPsdTol);

}  // namespace hsricc
