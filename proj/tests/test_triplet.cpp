#include "doctest.h"

#include "hsricc/triplet.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace hsricc;
using Eigen::VectorXd;

TEST_CASE("norm_h basics") {
    auto t = make_triplet(VectorXd::LinSpaced(3, 1.0, 3.0));
    VectorXd e1 = VectorXd::Zero(3);
    e1[0] = 1.0;
    CHECK(t->norm_h(e1) == doctest::Approx(1.0));
    CHECK(t->norm_h(VectorXd::Zero(3)) == 0.0);

    auto t2 = make_triplet((VectorXd(2) << 1.0, 4.0).finished());
    CHECK(t2->norm_h((VectorXd(2) << 3.0, 4.0).finished()) == doctest::Approx(5.0));
}

TEST_CASE("norm_v single mode and unit vector of V") {
    auto t = make_triplet((VectorXd(2) << 4.0, 9.0).finished());
    VectorXd e1 = VectorXd::Zero(2);
    e1[0] = 1.0;
    CHECK(t->norm_v(e1) == doctest::Approx(2.0));
    // ‖ρ₁⁻¹ e₁‖_V = 1
    CHECK(t->norm_v(e1 / 2.0) == doctest::Approx(1.0));
}

TEST_CASE("norm_v_dual single mode") {
    auto t = make_triplet((VectorXd(2) << 4.0, 9.0).finished());
    VectorXd e1 = VectorXd::Zero(2);
    e1[0] = 1.0;
    CHECK(t->norm_v_dual(e1) == doctest::Approx(0.5));
    CHECK(t->norm_v_dual(VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("weighted norms match the direct sums on random vectors") {
    const int n = 7;
    VectorXd rho_sq(n);
    for (int j = 0; j < n; ++j) rho_sq[j] = (j + 1.0) * (j + 1.0);
    auto t = make_triplet(rho_sq);
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd y(n);
        for (int j = 0; j < n; ++j) y[j] = rng.normal();
        double sv = 0.0, sd = 0.0, sh = 0.0;
        for (int j = 0; j < n; ++j) {
            sh += y[j] * y[j];
            sv += rho_sq[j] * y[j] * y[j];
            sd += y[j] * y[j] / rho_sq[j];
        }
        CHECK(t->norm_h(y) == doctest::Approx(std::sqrt(sh)).epsilon(1e-13));
        CHECK(t->norm_v(y) == doctest::Approx(std::sqrt(sv)).epsilon(1e-13));
        CHECK(t->norm_v_dual(y) == doctest::Approx(std::sqrt(sd)).epsilon(1e-13));
    }
}

TEST_CASE("interleaving and J-pairing") {
    auto t = make_triplet((VectorXd(4) << 2.0, 3.0, 5.0, 11.0).finished());
    const double rho1 = t->rho1();
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        VectorXd y(4);
        for (int j = 0; j < 4; ++j) y[j] = rng.normal();
        if (y.norm() == 0.0) continue;
        CHECK(t->norm_v_dual(y) <= t->norm_h(y) / rho1 * (1 + 1e-12));
        CHECK(t->norm_h(y) / rho1 <= t->norm_v(y) / (rho1 * rho1) * (1 + 1e-12));
        CHECK(t->j_pairing(y) ==
              doctest::Approx(t->norm_v(y) * t->norm_v(y)).epsilon(1e-12));
    }
}

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(make_triplet((VectorXd(2) << 1.0, 1.0).finished()), CertificateError);
    CHECK_THROWS_AS(make_triplet((VectorXd(2) << -1.0, 2.0).finished()), CertificateError);
    CHECK_THROWS_AS(make_triplet((VectorXd(2) << 2.0, 1.0).finished()), CertificateError);
    CHECK_THROWS_AS(SpectralTriplet((VectorXd(2) << 4.0, 9.0).finished(), 0.1, 1.0),
                    CertificateError);

    auto t = make_triplet((VectorXd(2) << 1.0, 2.0).finished());
    CHECK_THROWS_AS(t->norm_h(VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("kappa defaults are the sharp truncated values") {
    auto t = make_triplet((VectorXd(3) << 4.0, 5.0, 6.0).finished());
    CHECK(t->kappa1() == doctest::Approx(0.5));
    CHECK(t->kappa2() == doctest::Approx(0.5));
    SpectralTriplet loose((VectorXd(3) << 4.0, 5.0, 6.0).finished(), 1.0, 2.0);
    CHECK(loose.kappa1() == 1.0);
    CHECK(loose.kappa2() == 2.0);
}

TEST_CASE("power-law generator") {
    const auto t = SpectralTriplet::power_law(5, 2.0, 1.0);
    for (int j = 0; j < 5; ++j)
        CHECK(t.rho_sq()[j] == doctest::Approx(2.0 * (j + 1.0) * (j + 1.0)));
    CHECK_THROWS_AS(SpectralTriplet::power_law(0, 1.0, 1.0), CertificateError);
}
