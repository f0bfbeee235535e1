#pragma once

#include <Eigen/Core>

#include <memory>

#include "hsricc/errors.hpp"

namespace hsricc {

// Coordinates of a vector of H in the orthonormal basis {e_j}.
using VectorH = Eigen::VectorXd;

// Truncated variational triplet V ⊂ H ⊂ V′, represented by the spectral data
// of the canonical isomorphism J: the eigenvalues ρ_j² (Je_j = ρ_j² e_j,
// strictly increasing, ρ_1² > 0) and the embedding constants κ₁, κ₂ of
// ‖y‖_H ≤ κ₁‖y‖_V and ‖y‖_{V′} ≤ κ₂‖y‖_H.
//
// κ defaults are the sharp truncated values κ₁ = κ₂ = ρ₁⁻¹; they can be
// overridden to model looser embeddings, but never below the sharp values.
// Immutable after construction.
class SpectralTriplet {
public:
    explicit SpectralTriplet(Eigen::VectorXd rho_sq);
    SpectralTriplet(Eigen::VectorXd rho_sq, double kappa1, double kappa2);

    // Power-law generator rho_sq[j] = c·(j+1)^{2s} for Laplacian-like J.
    static SpectralTriplet power_law(int n, double c, double s);

    int dim() const { return static_cast<int>(rho_sq_.size()); }
    const Eigen::VectorXd& rho_sq() const { return rho_sq_; }
    double rho1() const { return rho_; }
    double kappa1() const { return kappa1_; }
    double kappa2() const { return kappa2_; }

    // ‖y‖_H = (Σ y_j²)^{1/2}
    double norm_h(const VectorH& y) const;
    // ‖y‖_V = (Σ ρ_j² y_j²)^{1/2}, so ‖e_j‖_V = ρ_j
    double norm_v(const VectorH& y) const;
    // ‖y‖_{V′} = (Σ ρ_j⁻² y_j²)^{1/2}, so ‖e_j‖_{V′} = ρ_j⁻¹
    double norm_v_dual(const VectorH& y) const;
    // ⟨Jy, y⟩ = Σ ρ_j² y_j² = ‖y‖_V²
    double j_pairing(const VectorH& y) const;

    bool same_as(const SpectralTriplet& other) const;

    void check_vector(const VectorH& y) const;

private:
    Eigen::VectorXd rho_sq_;
    double rho_;  // ρ₁
    double kappa1_;
    double kappa2_;
};

using TripletPtr = std::shared_ptr<const SpectralTriplet>;

inline TripletPtr make_triplet(Eigen::VectorXd rho_sq) {
    return std::make_shared<const SpectralTriplet>(std::move(rho_sq));
}

}  // namespace hsricc
