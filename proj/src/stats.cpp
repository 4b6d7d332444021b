#include "tphd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tphd {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double log_gaussian(const Vec& x, const Vec& mean, const SymPosDef& cov) {
    if (x.size() != mean.size() || x.size() != cov.dim())
        throw std::domain_error("log_gaussian: dimension mismatch");
    const Vec diff = x - mean;
    const double quad = diff.dot(cov.solve(diff));
    return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + cov.log_det() + quad);
}

double log_gaussian(const Vec& x, const Vec& mean, const Mat& cov) {
    return log_gaussian(x, mean, SymPosDef(cov));
}

double log_gamma_pdf(double value, double shape, double rate) {
    if (!(value > 0.0) || !(shape > 0.0) || !(rate > 0.0))
        throw std::domain_error("log_gamma_pdf: value, shape and rate must be positive");
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(value) - rate * value;
}

double log_multivariate_gamma(int dim, double x) {
    if (dim < 1) throw std::domain_error("log_multivariate_gamma: dim must be >= 1");
    if (!(x > 0.5 * (dim - 1)))
        throw std::domain_error("log_multivariate_gamma: argument must exceed (d-1)/2");
    double out = 0.25 * dim * (dim - 1) * std::log(std::numbers::pi);
    for (int j = 1; j <= dim; ++j) out += std::lgamma(x + 0.5 * (1 - j));
    return out;
}

double log_inverse_wishart_pdf(const SymPosDef& x, double dof, const SymPosDef& scale) {
    const int d = x.dim();
    if (scale.dim() != d)
        throw std::domain_error("log_inverse_wishart_pdf: dimension mismatch");
    if (!(dof > 2.0 * d))
        throw std::domain_error("log_inverse_wishart_pdf: dof must exceed 2d");
    const double half_nu = 0.5 * (dof - d - 1);
    const double trace_term = x.solve(scale.mat()).trace();
    return half_nu * scale.log_det() - dof * 0.5 * x.log_det() - 0.5 * trace_term -
           half_nu * d * std::numbers::ln2 - log_multivariate_gamma(d, half_nu);
}

double log_sum_exp(const std::vector<double>& terms) {
    double m = kNegInf;
    for (double t : terms) m = std::max(m, t);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace tphd
