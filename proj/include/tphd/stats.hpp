#pragma once

#include "tphd/spd.hpp"

#include <vector>

namespace tphd {

/// log N(x; mean, cov). Throws std::domain_error on dimension mismatch or
/// non-PD covariance.
double log_gaussian(const Vec& x, const Vec& mean, const SymPosDef& cov);

/// Same, for covariances already known to be PD on the hot path.
double log_gaussian(const Vec& x, const Vec& mean, const Mat& cov);

/// log of the shape-rate Gamma density: value^(shape-1) e^(-rate*value)
/// rate^shape / Gamma(shape). All arguments must be positive.
double log_gamma_pdf(double value, double shape, double rate);

/// log of the inverse Wishart density on d x d SPD matrices, in the
/// convention with mean scale/(dof - 2d - 2) and normalizer exponent
/// |scale|^((dof-d-1)/2):
///
///   IW(X; dof, scale) = |scale|^((dof-d-1)/2) |X|^(-dof/2)
///                       exp(-tr(scale X^{-1})/2)
///                       / (2^((dof-d-1)d/2) Gamma_d((dof-d-1)/2))
///
/// Requires dof > 2d.
double log_inverse_wishart_pdf(const SymPosDef& x, double dof, const SymPosDef& scale);

/// log of the multivariate gamma function Gamma_d(x); requires x > (d-1)/2.
double log_multivariate_gamma(int dim, double x);

/// log(sum_i exp(terms[i])); empty input or all -inf yields -inf.
double log_sum_exp(const std::vector<double>& terms);
double log_sum_exp(double a, double b);

}  // namespace tphd
