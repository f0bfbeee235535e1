#pragma once

#include <limits>
#include <optional>

#include "hsricc/hinf.hpp"

namespace hsricc {

// Sharp Hardy constant H_N = (N-2)²/4.
double hardy_constant(int space_dim);

// Heat equation with the singular potential λ/|x|² on the unit ball of R³,
// restricted to the radially symmetric subspace: the substitution v = r·y
// turns −Δ − λ/|x|² into −v″ − λ v/r² on (0,1) with Dirichlet ends, eigenbasis
// sin(jπr)/(r·norm) and Laplacian eigenvalues (jπ)². Every Hardy integral is
// then one-dimensional.
struct HardyPlantSpec {
    int space_dim = 3;         // N; the radial reduction is exact for N = 3 only
    double lambda_hardy = 0.0; // in [0, H_N)
    int modes = 32;
    Eigen::VectorXd b_profile; // coefficients of b in the eigenbasis; empty = j^{-2} profile
    double gamma_perf = std::numeric_limits<double>::infinity();
    std::optional<double> c1_weyl;        // default: fitted 0.99·min_j λ_j j^{-2/N}
    std::optional<double> domain_measure; // default: volume of the unit ball of R^N
};

struct HardyPlant {
    ControlPlant plant;
    Eigen::MatrixXd hardy_mat;    // (∫ e_j e_k / |x|²)_{k,j}
    Eigen::VectorXd laplace_eigs; // λ_j = (jπ)²
    double omega = 0.0;           // ½(1 − λ/H_N), verified against the matrices
    double coercivity_margin = 0.0;  // min eig of sym(a) − ω·diag(λ_j)
    double c1_weyl = 0.0;
    double domain_measure = 0.0;
    HardyPlantSpec spec;
};

// Assembles the plant in the Dirichlet-Laplacian eigenbasis:
// a = diag(λ_j) − λ_hardy·hardy_mat, B₁ = C₁ = diag(1/λ_j), B₂ = b_profile.
// Throws CertificateError if the coercivity certificate fails (quadrature
// resolution) or the Weyl bound c₁ j^{2/N} < λ_j does not hold.
HardyPlant build_hardy_plant(const HardyPlantSpec& spec);

// (Ay, y) = yᵀ a y on the plant triplet.
double hardy_quadratic_form(const HardyPlant& hp, const VectorH& y);

// Certified bracket for Σ_{j≥1} j^{-exponent} (partial sum plus integral tail
// bounds); exponent > 1.
struct ZetaBracket {
    double lower = 0.0;
    double upper = 0.0;
};
ZetaBracket zeta_sum_bracket(double exponent, long long terms = 1000000);

// Advisory record for the sufficient condition Σ j^{-4/N} ≤ c₁² m(Ω) γ² ‖b‖²:
// the condition verdict next to the direct eigenvalue check of Γ. The
// condition is only sufficient, so (condition false, Γ PSD) is legal;
// (condition true, Γ not PSD) contradicts the lemma and is flagged.
struct Lemma51Record {
    ZetaBracket zeta;
    double rhs = 0.0;
    bool condition_holds = false;  // certified via the bracket upper bound
    bool condition_fails = false;  // certified via the bracket lower bound
    double gamma_min_eig = 0.0;
    bool gamma_psd = false;
    bool consistent = true;
};
Lemma51Record lemma51_condition(const HardyPlant& hp);

// HS norms of B₁B₁*, C₁*C₁, B₂B₂*, Γ at a ladder of truncation prefixes, the
// Parseval identity ‖B₂B₂*‖ = ‖b‖², and the Weyl-bounded trace sums.
struct HsMembershipReport {
    std::vector<int> mode_counts;
    std::vector<double> b1b1_hs, c1c1_hs, b2b2_hs, gamma_hs;
    double b2b2_parseval_dev = 0.0;
    double b1_trace_sum = 0.0;   // Σ λ_j^{-2}
    double weyl_trace_cap = 0.0; // c₁^{-2}·(Σ j^{-4/N} upper bound)
    bool trace_bounded = false;
    double gamma_growth_last = 0.0;  // relative ‖Γ‖ change over the last doubling
};
HsMembershipReport hs_membership_report(const HardyPlant& hp);

namespace detail {
// ∫₀¹ sin(aπr) sin(bπr) / r² dr on a graded-plus-uniform panel mesh.
double hardy_integral(int a, int b, int modes);
}

}  // namespace hsricc
