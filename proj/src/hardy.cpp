#include "hsricc/hardy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace hsricc {

namespace detail {

namespace {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by Newton
// iteration on the Legendre polynomial.
struct GaussRule {
    std::vector<double> nodes, weights;
};

const GaussRule& gauss_rule_20() {
    static const GaussRule rule = [] {
        constexpr int m = 20;
        GaussRule r;
        r.nodes.resize(m);
        r.weights.resize(m);
        for (int i = 0; i < m; ++i) {
            // Chebyshev initial guess
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = m * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = m * (x * p1 - p0) / (x * x - 1.0);
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

double panel_integral(double lo, double hi, int a, int b) {
    const GaussRule& rule = gauss_rule_20();
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = mid + half * rule.nodes[i];
        acc += rule.weights[i] * std::sin(a * M_PI * r) * std::sin(b * M_PI * r) / (r * r);
    }
    return acc * half;
}

}  // namespace

double hardy_integral(int a, int b, int modes) {
    // Uniform panels resolve the oscillation on [r_c, 1]; geometric refinement
    // toward the origin handles the 1/r² weight (the integrand itself extends
    // continuously to r = 0 after the radial substitution).
    const int uniform_panels = std::max(64, 4 * modes);
    const double r_cut = 1.0 / uniform_panels;
    double acc = 0.0;
    for (int i = 0; i < uniform_panels - 1; ++i) {
        const double lo = r_cut + (1.0 - r_cut) * i / (uniform_panels - 1.0);
        const double hi = r_cut + (1.0 - r_cut) * (i + 1) / (uniform_panels - 1.0);
        acc += panel_integral(lo, hi, a, b);
    }
    double hi = r_cut;
    for (int i = 0; i < 48; ++i) {
        const double lo = hi * 0.5;
        acc += panel_integral(lo, hi, a, b);
        hi = lo;
    }
    // remaining [0, hi] with the Taylor value of the regular integrand
    acc += hi * (a * b * M_PI * M_PI);
    return acc;
}

}  // namespace detail

double hardy_constant(int space_dim) {
    if (space_dim < 1) throw CertificateError("hardy_constant: space_dim must be >= 1");
    const double d = space_dim - 2.0;
    return 0.25 * d * d;
}

HardyPlant build_hardy_plant(const HardyPlantSpec& spec_in) {
    HardyPlantSpec spec = spec_in;
    if (spec.space_dim != 3)
        throw CertificateError("build_hardy_plant: the radial reduction v = r·y is exact only "
                               "for N = 3; other dimensions are not assembled");
    const double h_n = hardy_constant(spec.space_dim);
    if (!(spec.lambda_hardy >= 0.0) || !(spec.lambda_hardy < h_n))
        throw CertificateError("build_hardy_plant: lambda_hardy must lie in [0, H_N)");
    if (spec.modes < 1) throw CertificateError("build_hardy_plant: modes must be >= 1");
    const int n = spec.modes;
    if (spec.b_profile.size() == 0) {
        spec.b_profile.resize(n);
        for (int j = 0; j < n; ++j) spec.b_profile[j] = std::pow(j + 1.0, -2.0);
    }
    if (spec.b_profile.size() != n)
        throw DimensionError("build_hardy_plant: b_profile length must equal modes");
    if (!(spec.gamma_perf > 0.0))
        throw CertificateError("build_hardy_plant: gamma_perf must be > 0");

    HardyPlant hp;
    hp.spec = spec;
    hp.laplace_eigs.resize(n);
    for (int j = 0; j < n; ++j) hp.laplace_eigs[j] = (j + 1.0) * M_PI * (j + 1.0) * M_PI;

    // hardy_mat(k,j) = ∫ e_j e_k /|x|² dx = 2 ∫₀¹ sin(jπr) sin(kπr)/r² dr
    hp.hardy_mat.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            const double v = 2.0 * detail::hardy_integral(j + 1, k + 1, n);
            hp.hardy_mat(k, j) = v;
            hp.hardy_mat(j, k) = v;
        }

    Eigen::MatrixXd a = Eigen::MatrixXd(hp.laplace_eigs.asDiagonal()) -
                        spec.lambda_hardy * hp.hardy_mat;

    hp.omega = 0.5 * (1.0 - spec.lambda_hardy / h_n);
    {
        const Eigen::MatrixXd cert =
            0.5 * (a + a.transpose()) - hp.omega * Eigen::MatrixXd(hp.laplace_eigs.asDiagonal());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert, Eigen::EigenvaluesOnly);
        hp.coercivity_margin = es.eigenvalues().minCoeff();
        if (hp.coercivity_margin < -1e-8)
            throw CertificateError(
                "build_hardy_plant: coercivity certificate failed (margin " +
                std::to_string(hp.coercivity_margin) + "); quadrature resolution too low");
    }

    // Weyl constant: fitted on the retained modes unless supplied
    const double exponent = 2.0 / spec.space_dim;
    double fitted = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        fitted = std::min(fitted, hp.laplace_eigs[j] / std::pow(j + 1.0, exponent));
    hp.c1_weyl = spec.c1_weyl.value_or(0.99 * fitted);
    for (int j = 0; j < n; ++j)
        if (!(hp.c1_weyl * std::pow(j + 1.0, exponent) < hp.laplace_eigs[j]))
            throw CertificateError("build_hardy_plant: Weyl bound c1·j^{2/N} < lambda_j fails "
                                   "for the supplied c1 at mode " + std::to_string(j + 1));
    // m(unit ball of R^N) = pi^{N/2} / Gamma(N/2 + 1)
    hp.domain_measure = spec.domain_measure.value_or(
        std::pow(M_PI, 0.5 * spec.space_dim) / std::tgamma(0.5 * spec.space_dim + 1.0));

    Eigen::VectorXd inv_eigs = hp.laplace_eigs.cwiseInverse();
    auto triplet = make_triplet(hp.laplace_eigs);
    hp.plant = ControlPlant::checked(triplet, std::move(a),
                                     Eigen::MatrixXd(inv_eigs.asDiagonal()),
                                     Eigen::MatrixXd(spec.b_profile),
                                     Eigen::MatrixXd(inv_eigs.asDiagonal()), spec.gamma_perf);
    return hp;
}

double hardy_quadratic_form(const HardyPlant& hp, const VectorH& y) {
    hp.plant.triplet->check_vector(y);
    return y.dot(hp.plant.a_mat * y);
}

ZetaBracket zeta_sum_bracket(double exponent, long long terms) {
    if (!(exponent > 1.0)) throw CertificateError("zeta_sum_bracket: exponent must be > 1");
    if (terms < 1) throw CertificateError("zeta_sum_bracket: terms must be >= 1");
    long double partial = 0.0L;
    for (long long j = terms; j >= 1; --j)  // ascending magnitudes
        partial += std::pow(static_cast<long double>(j), -static_cast<long double>(exponent));
    const long double s = exponent;
    const long double tail_lo = std::pow(static_cast<long double>(terms + 1), 1.0L - s) / (s - 1.0L);
    const long double tail_hi = std::pow(static_cast<long double>(terms), 1.0L - s) / (s - 1.0L);
    return ZetaBracket{static_cast<double>(partial + tail_lo),
                       static_cast<double>(partial + tail_hi)};
}

Lemma51Record lemma51_condition(const HardyPlant& hp) {
    const int nn = hp.spec.space_dim;
    if (nn < 1 || nn >= 4)
        throw CertificateError("lemma51_condition: requires 1 <= N < 4 for the sums to converge");
    Lemma51Record rec;
    rec.zeta = zeta_sum_bracket(4.0 / nn);
    const double bb = hp.spec.b_profile.squaredNorm();
    const double g2 = hp.spec.gamma_perf * hp.spec.gamma_perf;
    rec.rhs = bb == 0.0 ? 0.0 : hp.c1_weyl * hp.c1_weyl * hp.domain_measure * g2 * bb;
    rec.condition_holds = rec.zeta.upper <= rec.rhs;
    rec.condition_fails = rec.zeta.lower > rec.rhs;

    const RiccatiProblem prob = build_riccati_problem(hp.plant);
    rec.gamma_min_eig = min_sym_eig(HsOperator(hp.plant.triplet, prob.Q.gamma_mat));
    rec.gamma_psd = rec.gamma_min_eig >= -kPsdTol * (1.0 + prob.Q.gamma_mat.norm());
    rec.consistent = !(rec.condition_holds && !rec.gamma_psd);
    return rec;
}

HsMembershipReport hs_membership_report(const HardyPlant& hp) {
    const int n = hp.spec.modes;
    HsMembershipReport rep;
    for (int m : {n / 4, n / 2, n})
        if (m >= 1 && (rep.mode_counts.empty() || m > rep.mode_counts.back()))
            rep.mode_counts.push_back(m);

    const double inv_g2 = std::isinf(hp.spec.gamma_perf)
                              ? 0.0
                              : 1.0 / (hp.spec.gamma_perf * hp.spec.gamma_perf);
    for (int m : rep.mode_counts) {
        const Eigen::VectorXd lam = hp.laplace_eigs.head(m);
        const Eigen::VectorXd b = hp.spec.b_profile.head(m);
        const Eigen::VectorXd inv2 = lam.cwiseInverse().cwiseAbs2();  // λ_j^{-2}
        rep.b1b1_hs.push_back(inv2.norm());                           // ‖diag(λ^{-2})‖_HS
        rep.c1c1_hs.push_back(inv2.norm());
        const Eigen::MatrixXd bbt = b * b.transpose();
        rep.b2b2_hs.push_back(bbt.norm());
        const Eigen::MatrixXd gamma = bbt - inv_g2 * Eigen::MatrixXd(inv2.asDiagonal());
        rep.gamma_hs.push_back(gamma.norm());
    }
    rep.b2b2_parseval_dev =
        std::abs(rep.b2b2_hs.back() - hp.spec.b_profile.squaredNorm());

    const ZetaBracket zeta = zeta_sum_bracket(4.0 / hp.spec.space_dim);
    rep.weyl_trace_cap = zeta.upper / (hp.c1_weyl * hp.c1_weyl);
    rep.b1_trace_sum = hp.laplace_eigs.cwiseInverse().cwiseAbs2().sum();
    rep.trace_bounded = rep.b1_trace_sum <= rep.weyl_trace_cap;

    const size_t last = rep.gamma_hs.size() - 1;
    rep.gamma_growth_last =
        last >= 1 && rep.gamma_hs[last] > 0.0
            ? std::abs(rep.gamma_hs[last] - rep.gamma_hs[last - 1]) / rep.gamma_hs[last]
            : 0.0;
    return rep;
}

}  // namespace hsricc
