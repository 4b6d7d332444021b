#include "tphd/spd.hpp"

#include <cmath>
#include <stdexcept>

namespace tphd {

bool is_symmetric(const Mat& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

SymPosDef::SymPosDef(Mat m) : mat_(std::move(m)) {
    if (mat_.rows() == 0 || mat_.rows() != mat_.cols())
        throw std::domain_error("SymPosDef: matrix must be square and non-empty");
    if (!is_symmetric(mat_))
        throw std::domain_error("SymPosDef: matrix is not symmetric");
    llt_.compute(mat_);
    if (llt_.info() != Eigen::Success)
        throw std::domain_error("SymPosDef: matrix is not positive definite");
    log_det_ = 0.0;
    const auto& L = llt_.matrixL();
    for (int i = 0; i < mat_.rows(); ++i) {
        const double d = L(i, i);
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::domain_error("SymPosDef: matrix is not positive definite");
        log_det_ += 2.0 * std::log(d);
    }
}

Mat symmetric_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    if (es.info() != Eigen::Success)
        throw std::domain_error("symmetric_sqrt: eigendecomposition failed");
    Vec ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0)
        throw std::domain_error("symmetric_sqrt: matrix is not positive definite");
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat ensure_spd(const Mat& m, double jitter) {
    Mat s = symmetrize(m);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::LLT<Mat> llt(s);
        if (llt.info() == Eigen::Success) return s;
        s += jitter * Mat::Identity(s.rows(), s.cols());
        jitter *= 10.0;
    }
    throw std::domain_error("ensure_spd: could not repair matrix");
}

double min_eigenvalue(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    return es.eigenvalues().minCoeff();
}

}  // namespace tphd
