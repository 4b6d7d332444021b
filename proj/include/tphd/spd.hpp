#pragma once

#include <Eigen/Dense>

namespace tphd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Checks symmetry to a relative tolerance (default 1e-12 of the largest entry).
bool is_symmetric(const Mat& m, double rel_tol = 1e-12);

/// Validated symmetric positive definite matrix. Construction throws
/// std::domain_error if the argument is not symmetric PD.
class SymPosDef {
public:
    explicit SymPosDef(Mat m);

    [[nodiscard]] const Mat& mat() const { return mat_; }
    [[nodiscard]] int dim() const { return static_cast<int>(mat_.rows()); }

    /// log det, from the Cholesky factor computed at construction.
    [[nodiscard]] double log_det() const { return log_det_; }

    /// Solves A x = b.
    [[nodiscard]] Vec solve(const Vec& b) const { return llt_.solve(b); }
    [[nodiscard]] Mat solve(const Mat& b) const { return llt_.solve(b); }

private:
    Mat mat_;
    Eigen::LLT<Mat> llt_;
    double log_det_ = 0.0;
};

/// Symmetric (spectral) matrix square root of an SPD matrix. Throws
/// std::domain_error on non-PD input. This is the canonical root used
/// everywhere a square-root factor enters a formula, so that independently
/// coded routes produce identical values.
Mat symmetric_sqrt(const Mat& m);

/// (m + m^T)/2.
Mat symmetrize(const Mat& m);

/// Symmetrizes and, only if the Cholesky factorization fails, adds
/// jitter * I until it succeeds (at most a few attempts).
Mat ensure_spd(const Mat& m, double jitter = 1e-9);

/// Smallest eigenvalue of a symmetric matrix (test/diagnostic helper).
double min_eigenvalue(const Mat& m);

}  // namespace tphd
