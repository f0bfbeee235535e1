#include "doctest.h"

#include <Eigen/SVD>

#include "hsricc/hs_operator.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace hsricc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

TripletPtr t2() { return make_triplet((VectorXd(2) << 1.0, 4.0).finished()); }

TripletPtr t5() {
    VectorXd rho_sq(5);
    for (int j = 0; j < 5; ++j) rho_sq[j] = 1.5 * (j + 1.0) * (j + 1.0);
    return make_triplet(rho_sq);
}

}  // namespace

TEST_CASE("hs_norm on the identity") {
    auto id = HsOperator::identity(t2());
    CHECK(hs_norm(id, HsNormKind::HH) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hs_norm(id, HsNormKind::VdH) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("hs_norm matches the naive double sums") {
    auto t = t5();
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const MatrixXd m = oracles::random_matrix(rng, 5);
        HsOperator p(t, m);
        for (auto [kind, name] :
             {std::pair{HsNormKind::HH, "HH"}, std::pair{HsNormKind::VdH, "VdH"},
              std::pair{HsNormKind::HV, "HV"}, std::pair{HsNormKind::HVd, "HVd"},
              std::pair{HsNormKind::VH, "VH"}}) {
            CHECK(hs_norm(p, kind) ==
                  doctest::Approx(oracles::naive_hs_norm(m, t->rho_sq(), name)).epsilon(1e-12));
        }
    }
}

TEST_CASE("vnorm and dual_norm") {
    auto zero = HsOperator::zero(t2());
    CHECK(vnorm(zero) == 0.0);
    CHECK(dual_norm(zero) == 0.0);

    auto id = HsOperator::identity(t2());
    CHECK(vnorm(id) == doctest::Approx(2.0 * std::sqrt(5.0)));

    // ‖P‖_𝓥 ≥ (ρ₁ + κ₁⁻¹)‖P‖_𝓗 on random operators
    auto t = t5();
    const double c = t->rho1() + 1.0 / t->kappa1();
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        HsOperator p(t, oracles::random_matrix(rng, 5));
        CHECK(vnorm(p) >= c * hs_norm(p, HsNormKind::HH) * (1 - 1e-12));
    }
}

TEST_CASE("compose") {
    auto t = t2();
    auto id = HsOperator::identity(t);
    HsOperator p(t, (MatrixXd(2, 2) << 1.0, 2.0, 3.0, 4.0).finished());
    CHECK(compose(id, p).mat() == p.mat());

    auto d1 = HsOperator::diagonal(t, (VectorXd(2) << 1.0, 2.0).finished());
    auto d2 = HsOperator::diagonal(t, (VectorXd(2) << 3.0, 4.0).finished());
    const MatrixXd prod = compose(d1, d2).mat();
    CHECK(prod(0, 0) == doctest::Approx(3.0));
    CHECK(prod(1, 1) == doctest::Approx(8.0));
    CHECK(prod(0, 1) == 0.0);

    auto t5p = t5();
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        HsOperator a(t5p, oracles::random_matrix(rng, 5));
        HsOperator b(t5p, oracles::random_matrix(rng, 5));
        const HsOperator ab = compose(a, b);
        CHECK((ab.mat() - a.mat() * b.mat()).norm() == 0.0);
        CHECK(hs_norm(ab, HsNormKind::HH) <=
              hs_norm(a, HsNormKind::HH) * hs_norm(b, HsNormKind::HH) * (1 + 1e-12));
    }
}

TEST_CASE("adjoint, psd checks, min_sym_eig") {
    auto t = t2();
    auto d = HsOperator::diagonal(t, (VectorXd(2) << 1.0, 2.0).finished());
    CHECK(is_psd(d));
    CHECK(min_sym_eig(d) == doctest::Approx(1.0));

    auto bad = HsOperator::diagonal(t, (VectorXd(2) << 1.0, -1e-3).finished());
    CHECK_FALSE(is_psd(bad, 1e-9));

    auto t5p = t5();
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const MatrixXd g = oracles::random_matrix(rng, 5);
        HsOperator gram(t5p, g.transpose() * g);
        CHECK(is_psd(gram));
    }
}

TEST_CASE("adjoint is an involution and swaps the V/V' norm roles") {
    auto t = t5();
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        HsOperator p(t, oracles::random_matrix(rng, 5));
        const HsOperator pt = adjoint(p);
        CHECK((adjoint(pt).mat() - p.mat()).norm() == 0.0);
        CHECK(hs_norm(pt, HsNormKind::HV) ==
              doctest::Approx(hs_norm(p, HsNormKind::VdH)).epsilon(1e-13));
        CHECK(hs_norm(pt, HsNormKind::VdH) ==
              doctest::Approx(hs_norm(p, HsNormKind::HV)).epsilon(1e-13));
        CHECK(hs_norm(pt, HsNormKind::HVd) ==
              doctest::Approx(hs_norm(p, HsNormKind::VH)).epsilon(1e-13));
        CHECK(hs_norm(pt, HsNormKind::VH) ==
              doctest::Approx(hs_norm(p, HsNormKind::HVd)).epsilon(1e-13));
        CHECK(hs_norm(pt, HsNormKind::HH) ==
              doctest::Approx(hs_norm(p, HsNormKind::HH)).epsilon(1e-13));
    }
}

TEST_CASE("operator norm is dominated by the HS norm") {
    auto t = t5();
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const MatrixXd m = oracles::random_matrix(rng, 5);
        Eigen::JacobiSVD<MatrixXd> svd(m);
        CHECK(svd.singularValues()[0] <=
              hs_norm(HsOperator(t, m), HsNormKind::HH) * (1 + 1e-12));
    }
}

TEST_CASE("nested norm chains") {
    auto t = t5();
    const double rho1 = t->rho1();
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        HsOperator p(t, oracles::random_matrix(rng, 5));
        const double hh = hs_norm(p, HsNormKind::HH);
        CHECK(rho1 * hh <= hs_norm(p, HsNormKind::VdH) * (1 + 1e-12));
        CHECK(hs_norm(p, HsNormKind::VH) <= hh / rho1 * (1 + 1e-12));
    }
}

TEST_CASE("trace pairing positivity (HS property (d))") {
    auto t = t5();
    auto id = HsOperator::identity(t);
    Rng rng(14);
    HsOperator p1(t, oracles::random_matrix(rng, 5));
    CHECK(pairing_positivity_check(p1, id));
    CHECK(pairing_positivity_check(p1, HsOperator::zero(t)));
    for (int trial = 0; trial < 100; ++trial) {
        HsOperator psd(t, oracles::random_psd(rng, 5, 0.0, 3.0));
        HsOperator q(t, oracles::random_matrix(rng, 5));
        CHECK(pairing_positivity_check(q, psd));
    }
    HsOperator notpsd(t, -MatrixXd::Identity(5, 5));
    CHECK_THROWS_AS(pairing_positivity_check(p1, notpsd), CertificateError);
}

TEST_CASE("trace pairing reduces both dual-space pairings to the same sum") {
    // ⟨P,Q⟩_{(V,H),(V′,H)} = Σ (P ẽ_j, Q ẽ̃_j) = Σ (Pe_j, Qe_j) = (P,Q)_HS
    auto t = t5();
    Rng rng(15);
    HsOperator p(t, oracles::random_matrix(rng, 5));
    HsOperator q(t, oracles::random_matrix(rng, 5));
    double direct = 0.0;
    for (int j = 0; j < 5; ++j) direct += p.mat().col(j).dot(q.mat().col(j));
    CHECK(trace_pairing(p, q) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("Lemma 1.1 at the truncated level") {
    auto t = t5();
    Rng rng(16);
    const VectorXd& rho_sq = t->rho_sq();
    for (int trial = 0; trial < 200; ++trial) {
        const double omega = rng.uniform(0.05, 1.0);
        const MatrixXd a = oracles::random_coercive_a(rng, rho_sq, omega);
        const MatrixXd pm = oracles::random_matrix(rng, 5);
        HsOperator p(t, pm);
        // Σ_j (P A e_j, P e_j)  and  Σ_j ⟨A*P e_j, P e_j⟩
        const double pair_pa = ((pm * a).transpose() * pm).trace();
        const double pair_ap = ((a.transpose() * pm).transpose() * pm).trace();
        const double vdh = hs_norm(p, HsNormKind::VdH);
        const double hv = hs_norm(p, HsNormKind::HV);
        CHECK(pair_pa >= omega * vdh * vdh * (1 - 1e-10) - 1e-12);
        CHECK(pair_ap >= omega * hv * hv * (1 - 1e-10) - 1e-12);
    }
}

TEST_CASE("dimension and triplet mismatch errors") {
    auto a = HsOperator::identity(t2());
    auto b = HsOperator::identity(t5());
    CHECK_THROWS_AS(compose(a, b), DimensionError);
    CHECK_THROWS_AS(HsOperator(t2(), MatrixXd::Zero(3, 3)), DimensionError);
}
