#include "hsricc/hs_operator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hsricc {

HsOperator::HsOperator(TripletPtr triplet, Eigen::MatrixXd mat)
    : triplet_(std::move(triplet)), mat_(std::move(mat)) {
    if (!triplet_) throw DimensionError("HsOperator: null triplet");
    if (mat_.rows() != triplet_->dim() || mat_.cols() != triplet_->dim())
        throw DimensionError("HsOperator: matrix is " + std::to_string(mat_.rows()) + "x" +
                             std::to_string(mat_.cols()) + ", triplet dimension is " +
                             std::to_string(triplet_->dim()));
}

HsOperator HsOperator::zero(TripletPtr triplet) {
    const int n = triplet->dim();
    return HsOperator(std::move(triplet), Eigen::MatrixXd::Zero(n, n));
}

HsOperator HsOperator::identity(TripletPtr triplet) {
    const int n = triplet->dim();
    return HsOperator(std::move(triplet), Eigen::MatrixXd::Identity(n, n));
}

HsOperator HsOperator::diagonal(TripletPtr triplet, const Eigen::VectorXd& diag) {
    if (diag.size() != triplet->dim())
        throw DimensionError("HsOperator::diagonal: length mismatch");
    return HsOperator(std::move(triplet), Eigen::MatrixXd(diag.asDiagonal()));
}

VectorH HsOperator::apply(const VectorH& y) const {
    triplet_->check_vector(y);
    return mat_ * y;
}

bool HsOperator::is_symmetric() const {
    if (!symmetric_flag_) {
        const double dev = (mat_ - mat_.transpose()).cwiseAbs().maxCoeff();
        symmetric_flag_ = dev <= kSymTol;
    }
    return *symmetric_flag_;
}

bool HsOperator::is_psd(double tol) const {
    if (tol == kPsdTol && psd_flag_) return *psd_flag_;
    const bool psd = hsricc::min_sym_eig(*this) >= -tol;
    if (tol == kPsdTol) psd_flag_ = psd;
    return psd;
}

void HsOperator::require_same_triplet(const HsOperator& other) const {
    if (!triplet_->same_as(*other.triplet_))
        throw DimensionError("HsOperator: operands live on different triplets");
}

double hs_norm(const HsOperator& p, HsNormKind kind) {
    const Eigen::MatrixXd& m = p.mat();
    const Eigen::ArrayXd w = p.triplet().rho_sq().array();
    switch (kind) {
        case HsNormKind::HH:
            return m.norm();
        case HsNormKind::VdH: {
            const Eigen::ArrayXd colsq = m.colwise().squaredNorm().transpose().array();
            return std::sqrt((colsq * w).sum());
        }
        case HsNormKind::VH: {
            const Eigen::ArrayXd colsq = m.colwise().squaredNorm().transpose().array();
            return std::sqrt((colsq / w).sum());
        }
        case HsNormKind::HV:
            return std::sqrt((m.array().square().colwise() * w).sum());
        case HsNormKind::HVd:
            return std::sqrt((m.array().square().colwise() / w).sum());
    }
    throw Error("hs_norm: unknown kind");
}

double vnorm(const HsOperator& p) {
    return hs_norm(p, HsNormKind::VdH) + hs_norm(p, HsNormKind::HV);
}

double dual_norm(const HsOperator& p) {
    return hs_norm(p, HsNormKind::HVd) + hs_norm(p, HsNormKind::VH);
}

HsOperator compose(const HsOperator& p2, const HsOperator& p1) {
    p2.require_same_triplet(p1);
    return HsOperator(p2.triplet_ptr(), p2.mat() * p1.mat());
}

HsOperator adjoint(const HsOperator& p) {
    return HsOperator(p.triplet_ptr(), p.mat().transpose());
}

double min_sym_eig(const HsOperator& p) {
    const Eigen::MatrixXd sym = 0.5 * (p.mat() + p.mat().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("min_sym_eig: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

bool is_psd(const HsOperator& p, double tol) { return p.is_psd(tol); }

double trace_pairing(const HsOperator& p, const HsOperator& q) {
    p.require_same_triplet(q);
    return p.mat().cwiseProduct(q.mat()).sum();
}

bool pairing_positivity_check(const HsOperator& p1, const HsOperator& p2, double tol) {
    p1.require_same_triplet(p2);
    if (!p2.is_symmetric() || !p2.is_psd())
        throw CertificateError("pairing_positivity_check: P2 must be symmetric PSD");
    const HsOperator p2p1 = compose(p2, p1);
    const HsOperator p1p2 = compose(p1, p2);
    const double scale = 1.0 + hs_norm(p1, HsNormKind::HH) * hs_norm(p1, HsNormKind::HH) *
                                   hs_norm(p2, HsNormKind::HH);
    return trace_pairing(p2p1, p1) >= -tol * scale && trace_pairing(p1p2, p1) >= -tol * scale;
}

}  // namespace hsricc
