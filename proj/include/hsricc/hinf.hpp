#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hsricc/riccati.hpp"

namespace hsricc {

// Plant data for y' + Ay = B₁w + B₂u, z = C₁y, with performance index γ.
// gamma_perf may be +inf, which drops the γ⁻²B₁B₁* term from Γ.
struct ControlPlant {
    TripletPtr triplet;
    Eigen::MatrixXd a_mat;   // n×n, ⟨A e_j, e_k⟩
    Eigen::MatrixXd b1_mat;  // n×m₁ (m₁ = 0 allowed: no disturbance channel)
    Eigen::MatrixXd b2_mat;  // n×m₂
    Eigen::MatrixXd c1_mat;  // p×n
    double gamma_perf = 1.0;

    static ControlPlant checked(TripletPtr triplet, Eigen::MatrixXd a, Eigen::MatrixXd b1,
                                Eigen::MatrixXd b2, Eigen::MatrixXd c1, double gamma_perf);
    int dim() const { return static_cast<int>(a_mat.rows()); }
};

// State feedback u = feedback_mat·y with F = −B₂*P and the closed-loop
// generator Ã = −A − B₂B₂*P.
struct ClosedLoop {
    Eigen::MatrixXd feedback_mat;  // m₂×n
    Eigen::MatrixXd atilde_mat;    // n×n
    Eigen::MatrixXd p_mat;         // the Riccati solution behind the feedback
    double spectral_abscissa = 0.0;
};

// Γ = B₂B₂* − γ⁻²B₁B₁*, F = C₁*C₁; coercivity of A and positivity of Γ are
// evaluated and recorded on the returned problem, never assumed.
RiccatiProblem build_riccati_problem(const ControlPlant& plant);

struct SynthesisResult {
    ClosedLoop loop;
    SolutionReport report;
};

// Solves the Riccati equation by the route the certificates allow and forms
// the feedback. Throws UnstableLoopError (with the spectrum) if the closed
// loop is not exponentially stable at the truncated level.
SynthesisResult synthesize(const ControlPlant& plant, const SolverConfig& cfg);

double spectral_abscissa(const Eigen::MatrixXd& m);

struct Disturbance {
    std::string label;
    std::function<Eigen::VectorXd(double)> base;  // m₁-valued w(t)
    // adds the proof-inspired worst-case term γ⁻²B₁*P y(t) on top of base
    bool add_worst_case_feedback = false;
};

struct SimOptions {
    double horizon = 0.0;       // 0 = default 20/|abscissa|
    double dt = 0.0;            // 0 = default min(0.1/|abscissa|, 1e-3·horizon)
    double energy_start = 0.0;  // accumulate the L² energies from this time on
    int store_stride = 0;       // 0 = choose so that ≤ 2048 samples are kept
};

struct TrajectoryRecord {
    std::vector<double> times;  // sampled (strided) grid
    std::vector<double> y_norm, z_norm, u_norm, running_ratio;
    double dt = 0.0;
    double energy_w = 0.0, energy_z = 0.0, energy_u = 0.0;
    double ratio = 0.0;  // (E_z + E_u)/(γ²E_w); 0 when E_w = 0
    // finite-horizon energy identity: (Py_T, y_T) + Σ 2dt(⟨Ay,Py⟩ + ‖B₂*Py‖² −
    // (B₁w,Py)) vanishes for the exact flow; for the implicit Euler trajectory
    // it equals −Σ(PΔy,Δy) exactly, which defect_check recomputes.
    double energy_defect = 0.0;
    double energy_defect_check = 0.0;
    double defect_scale = 0.0;
    Eigen::VectorXd y_final;
};

// L-stable implicit Euler with one prefactored linear solve per step, y(0) = 0.
TrajectoryRecord simulate_closed_loop(const ClosedLoop& cl, const ControlPlant& plant,
                                      const Disturbance& dist, const SimOptions& opt = {});

struct GainRow {
    std::string label;
    double ratio = 0.0;
    double energy_w = 0.0;
    double energy_out = 0.0;
};

struct GainReport {
    std::vector<GainRow> rows;
    double max_ratio = 0.0;
    std::string worst_label;
    bool pass = false;  // max_ratio < 1 — a verdict, not an exception
};

GainReport verify_gain(const ClosedLoop& cl, const ControlPlant& plant,
                       const std::vector<Disturbance>& family, const SimOptions& opt = {});

// Sinusoid frequency sweeps per channel, seeded piecewise-constant noise
// paths, and worst-case feedback-generated signals.
std::vector<Disturbance> standard_disturbance_family(const ControlPlant& plant,
                                                     const ClosedLoop& cl, int count,
                                                     std::uint64_t seed);

}  // namespace hsricc
