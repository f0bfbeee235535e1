#pragma once

#include <map>
#include <string>
#include <vector>

#include "hsricc/resolvents.hpp"

namespace hsricc {

// The equation A*P + PA + PΓP = F on a truncated triplet. F is symmetric PSD
// (it equals C₁*C₁ when built from control data); Γ is symmetric.
struct RiccatiProblem {
    LyapunovOperator L;
    QuadraticOperator Q;
    HsOperator F;

    static RiccatiProblem checked(LyapunovOperator l, QuadraticOperator q, HsOperator f);
    const SpectralTriplet& triplet() const { return F.triplet(); }
};

// ‖A*P + PA + PΓP − F‖_{(H,H)}, recomputed from scratch.
double riccati_residual(const RiccatiProblem& prob, const HsOperator& p);

struct SolverConfig {
    std::vector<double> lambda_schedule;  // strictly decreasing toward 0
    std::vector<double> omega_schedule;   // strictly decreasing toward 0
    // Absolute stop on fixed-point increments. The working stop is the
    // λ-proportional one (increment ≈ λ·regularized-residual), so the default
    // keeps this floor effectively off.
    double fp_tol = 1e-17;
    double cauchy_tol = 1e-9;    // gap between successive stage solutions
    double residual_tol = 1e-8;  // target for the true residual
    int max_fp_iter = 200000;
    int max_outer = 60;

    static SolverConfig defaults();
    void validate() const;
};

std::vector<double> geometric_schedule(double start, double ratio, int count);
// 10^{-k/2}, k = 0..kmax
std::vector<double> half_power_schedule(int kmax);

struct StageRecord {
    double stage_value = 0.0;  // λ or ω
    int iterations = 0;
    // Max increment ratio over iterations whose increments sit above the noise
    // floor; NaN when fewer than two such increments were seen.
    double observed_contraction = 0.0;
    double theoretical_contraction = 0.0;  // (1 + λω(ρ₁+κ₁⁻¹))⁻¹
    double stage_gap = 0.0;                // ‖P_stage − P_prev_stage‖_HH
    double residual = 0.0;                 // true residual after the stage
    double p_norm_hh = 0.0;
};

struct SolutionReport {
    HsOperator P;
    double residual_hs = 0.0;
    double min_eig = 0.0;
    std::vector<StageRecord> history;
    std::map<std::string, bool> bounds_checklist;
    std::string route;  // "coercive" or "noncoercive"
    bool converged = false;
    // Order of the residual-certified Richardson extrapolation across stage
    // solutions that produced P (0 = a plain stage solution). The stage map
    // iterations and their contraction records are unaffected; extrapolants
    // are only ever accepted on the strength of their recomputed residual.
    int extrapolation_order = 0;
};

// Theorem 2.1 route: λ-continuation of the Yosida-regularized fixed point
//   P = λ(I+λ𝓛)⁻¹F + (I+λ𝓛)⁻¹(I+λ𝓑)⁻¹P,
// warm-started across stages, stopping on the recomputed true residual.
// Requires a certified ω > 0 on L, Γ ⪰ 0 and F symmetric PSD.
SolutionReport solve_coercive(const RiccatiProblem& prob, const SolverConfig& cfg,
                              const HsOperator* warm_start = nullptr);

// Theorem 3.1 route: ω-continuation A_ω = A + ωJ with solve_coercive inside,
// monitoring the a-priori bounds ‖P_ω‖_𝓗 ≤ g₀^{-1/2}‖C₁‖_𝓗 and
// ‖P_ω‖_𝓥 ≤ 2g₀^{-1/2}‖C₁‖_{(V′,H)}. Requires sym(A) ⪰ 0, Γ coercive
// (g₀ > 0) and F = C₁*C₁ with trivial kernel.
SolutionReport solve_noncoercive(const RiccatiProblem& prob, const SolverConfig& cfg);

// Independent oracle: Newton iteration whose steps solve the Lyapunov
// linearization through the dense Kronecker system. Test/cross-check use only.
HsOperator newton_kleinman_oracle(const RiccatiProblem& prob, const HsOperator* p0 = nullptr,
                                  double tol = 1e-11, int max_iter = 100);

struct UniquenessRecord {
    bool diagonal_instance = false;
    Eigen::VectorXd eigen_gap;          // γ¹_j − γ²_j (diagonal path only)
    Eigen::VectorXd uniqueness_factor;  // 2a_jj + (γ¹_j + γ²_j) g_jj
    double gap_hh = 0.0;
};

// Evaluates the uniqueness identity γ_j(2a_jj + (γ¹_j+γ²_j)g_jj) = 0 per mode
// on diagonal instances; reports ‖P₁−P₂‖_HH otherwise.
UniquenessRecord uniqueness_probe(const RiccatiProblem& prob, const HsOperator& p1,
                                  const HsOperator& p2);

}  // namespace hsricc
