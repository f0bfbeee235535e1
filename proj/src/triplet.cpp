#include "hsricc/triplet.hpp"

#include <cmath>

namespace hsricc {

namespace {

void validate_rho_sq(const Eigen::VectorXd& rho_sq) {
    if (rho_sq.size() == 0) throw CertificateError("SpectralTriplet: empty eigenvalue list");
    if (!(rho_sq[0] > 0.0))
        throw CertificateError("SpectralTriplet: rho_sq must be strictly positive");
    for (Eigen::Index j = 1; j < rho_sq.size(); ++j) {
        if (!(rho_sq[j] > rho_sq[j - 1]))
            throw CertificateError("SpectralTriplet: rho_sq must be strictly increasing");
    }
}

}  // namespace

SpectralTriplet::SpectralTriplet(Eigen::VectorXd rho_sq) : rho_sq_(std::move(rho_sq)) {
    validate_rho_sq(rho_sq_);
    rho_ = std::sqrt(rho_sq_[0]);
    kappa1_ = 1.0 / rho_;
    kappa2_ = 1.0 / rho_;
}

SpectralTriplet::SpectralTriplet(Eigen::VectorXd rho_sq, double kappa1, double kappa2)
    : rho_sq_(std::move(rho_sq)) {
    validate_rho_sq(rho_sq_);
    rho_ = std::sqrt(rho_sq_[0]);
    const double sharp = 1.0 / rho_;
    // κ below the sharp truncated value would contradict Eq. 7-1 on e_1.
    if (kappa1 < sharp * (1.0 - 1e-12) || kappa2 < sharp * (1.0 - 1e-12))
        throw CertificateError("SpectralTriplet: kappa below the sharp value rho_1^{-1}");
    kappa1_ = kappa1;
    kappa2_ = kappa2;
}

SpectralTriplet SpectralTriplet::power_law(int n, double c, double s) {
    if (n < 1) throw CertificateError("SpectralTriplet::power_law: n must be >= 1");
    if (!(c > 0.0)) throw CertificateError("SpectralTriplet::power_law: c must be > 0");
    if (!(s > 0.0)) throw CertificateError("SpectralTriplet::power_law: s must be > 0");
    Eigen::VectorXd rho_sq(n);
    for (int j = 0; j < n; ++j) rho_sq[j] = c * std::pow(j + 1.0, 2.0 * s);
    return SpectralTriplet(std::move(rho_sq));
}

void SpectralTriplet::check_vector(const VectorH& y) const {
    if (y.size() != rho_sq_.size())
        throw DimensionError("vector length " + std::to_string(y.size()) +
                             " does not match triplet dimension " + std::to_string(dim()));
}

double SpectralTriplet::norm_h(const VectorH& y) const {
    check_vector(y);
    return y.norm();
}

double SpectralTriplet::norm_v(const VectorH& y) const {
    check_vector(y);
    return std::sqrt(rho_sq_.cwiseProduct(y.cwiseAbs2()).sum());
}

double SpectralTriplet::norm_v_dual(const VectorH& y) const {
    check_vector(y);
    return std::sqrt(y.cwiseAbs2().cwiseQuotient(rho_sq_).sum());
}

double SpectralTriplet::j_pairing(const VectorH& y) const {
    check_vector(y);
    return rho_sq_.cwiseProduct(y.cwiseAbs2()).sum();
}

bool SpectralTriplet::same_as(const SpectralTriplet& other) const {
    if (this == &other) return true;
    return rho_sq_.size() == other.rho_sq_.size() && rho_sq_ == other.rho_sq_;
}

}  // namespace hsricc
