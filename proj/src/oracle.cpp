#include "tphd/oracle.hpp"

#include "tphd/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tphd::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int popcount(std::uint32_t m) { return static_cast<int>(std::popcount(m)); }

/// sum over all partitions Q of the elements in `mask` of
/// prod_{w in Q} term(w_mask), by recursion on the lowest element.
double partition_sum(std::uint32_t mask, const std::vector<double>& term) {
    if (mask == 0) return 1.0;
    const std::uint32_t low = mask & (~mask + 1u);
    const std::uint32_t rest = mask & ~low;
    double total = 0.0;
    // Cell containing the lowest element = low | sub, for each sub subset of rest.
    std::uint32_t sub = 0;
    while (true) {
        const std::uint32_t cell = low | sub;
        total += term[cell] * partition_sum(rest & ~sub, term);
        if (sub == rest) break;
        sub = (sub - rest) & rest;
    }
    return total;
}

void require_small(std::size_t n, const char* who) {
    if (n > 8) throw std::invalid_argument(std::string(who) + ": set size must be <= 8");
}

}  // namespace

LemmaCheck check_lemma1(const std::vector<double>& per_element,
                        const std::vector<double>& per_cell) {
    const std::size_t n = per_element.size();
    require_small(n, "check_lemma1");
    const std::uint32_t full = n == 0 ? 0u : ((1u << n) - 1u);
    if (per_cell.size() != (1u << n))
        throw std::invalid_argument("check_lemma1: per_cell must have 2^n entries");

    // lhs: subset sum of clutter products times partition sums of the rest.
    double lhs = 0.0;
    for (std::uint32_t y = 0;; ++y) {
        const std::uint32_t rest = full & ~y;
        double clutter_prod = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (rest & (1u << i)) clutter_prod *= per_element[i];
        lhs += clutter_prod * partition_sum(y, per_cell);
        if (y == full) break;
    }

    // rhs: single partition sum with kappa + tau per cell.
    std::vector<double> combined(per_cell.size(), 0.0);
    for (std::uint32_t w = 1; w < combined.size(); ++w) {
        combined[w] = per_cell[w];
        if (popcount(w) == 1) {
            for (std::size_t i = 0; i < n; ++i)
                if (w == (1u << i)) combined[w] += per_element[i];
        }
    }
    const double rhs = partition_sum(full, combined);
    return {lhs, rhs};
}

LemmaCheck check_lemma2(const std::vector<double>& f, const std::vector<double>& g, int n) {
    require_small(static_cast<std::size_t>(n), "check_lemma2");
    const std::uint32_t full = n == 0 ? 0u : ((1u << n) - 1u);
    if (f.size() != (1u << n) || g.size() != (1u << n))
        throw std::invalid_argument("check_lemma2: f and g must have 2^n entries");
    for (std::uint32_t w = 1; w <= full && full != 0; ++w)
        if (g[w] == 0.0) throw std::domain_error("check_lemma2: g vanishes on a cell");

    double lhs = 0.0;
    for (std::uint32_t w = 1; w <= full && full != 0; ++w)
        lhs += f[w] * partition_sum(full & ~w, g);

    // rhs over explicit partitions.
    double rhs = 0.0;
    std::vector<int> base(static_cast<std::size_t>(n));
    std::iota(base.begin(), base.end(), 0);
    for (const auto& p : enumerate_partitions_of(base)) {
        double gp = 1.0;
        double ratio_sum = 0.0;
        for (const auto& cell : p) {
            const std::uint32_t m = indices_to_mask(cell, base);
            gp *= g[m];
            ratio_sum += f[m] / g[m];
        }
        rhs += gp * ratio_sum;
    }
    return {lhs, rhs};
}

double log_cell_predictive_point(const Mat& cell_z, const TrajectoryGaussian& comp,
                                 const MeasurementModel& model) {
    if (cell_z.cols() != 1)
        throw std::invalid_argument("log_cell_predictive_point: cell must be a singleton");
    const Vec z = cell_z.col(0);
    const Vec predicted = model.H * comp.current_mean();
    const Mat s = symmetrize(model.H * comp.current_cov() * model.H.transpose() + model.R);
    const Vec diff = z - predicted;
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("log_cell_predictive_point: innovation covariance not PD");
    double ld = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
    const double quad = diff.dot(llt.solve(diff));
    return -0.5 * (s.rows() * std::log(2.0 * std::numbers::pi) + ld + quad);
}

double log_cell_predictive_extended(const Mat& cell_z, const GgiwComponent& comp,
                                    const MeasurementModel& model) {
    const int n = static_cast<int>(cell_z.cols());
    if (n < 1) throw std::invalid_argument("log_cell_predictive_extended: empty cell");
    const int d = comp.extent_dim();

    const Vec centroid = cell_z.rowwise().mean();
    Mat scatter = Mat::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        const Vec dz = cell_z.col(i) - centroid;
        scatter += dz * dz.transpose();
    }

    const Mat extent = comp.extent_mean();
    const Mat s = symmetrize(model.H * comp.traj.current_cov() * model.H.transpose() +
                             extent / static_cast<double>(n));
    const Vec innovation = centroid - model.H * comp.traj.current_mean();
    const Mat root = symmetric_sqrt(extent) * symmetric_sqrt(s).inverse();
    const Vec whitened = root * innovation;
    const Mat updated_scale =
        symmetrize(comp.iw_scale + whitened * whitened.transpose() + scatter);

    const double dof = comp.iw_dof;
    const double dof_post = dof + n;
    const double shape = comp.gamma_shape;
    const double rate = comp.gamma_rate;

    Eigen::LLT<Mat> llt_prior(comp.iw_scale), llt_post(updated_scale), llt_s(s),
        llt_x(extent);
    if (llt_post.info() != Eigen::Success || llt_s.info() != Eigen::Success)
        throw std::domain_error("log_cell_predictive_extended: non-PD intermediate");
    auto log_det = [](const Eigen::LLT<Mat>& llt, Eigen::Index dim) {
        double ld = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
        return ld;
    };

    double out = -0.5 * d * (n * std::log(std::numbers::pi) + std::log(static_cast<double>(n)));
    out += 0.5 * (dof - d - 1.0) * log_det(llt_prior, d);
    out -= 0.5 * (dof_post - d - 1.0) * log_det(llt_post, d);
    out += log_multivariate_gamma(d, 0.5 * (dof_post - d - 1.0));
    out -= log_multivariate_gamma(d, 0.5 * (dof - d - 1.0));
    out += 0.5 * log_det(llt_x, d) - 0.5 * log_det(llt_s, d);
    out += std::lgamma(shape + n) - std::lgamma(shape);
    out += shape * std::log(rate) - (shape + n) * std::log(rate + 1.0);
    return out;
}

MeasurementDensityOracle::MeasurementDensityOracle(const Mat& z, const PhdMixture& predicted,
                                                   const MeasurementModel& model) {
    count_ = static_cast<int>(z.cols());
    if (count_ > 6)
        throw std::invalid_argument("MeasurementDensityOracle: at most 6 measurements");
    full_mask_ = count_ == 0 ? 0u : ((1u << count_) - 1u);
    prior_mass_ = total_mass(predicted);
    clutter_rate_ = model.clutter_rate;

    const double pd = model.detection_prob;
    tau_empty_ = 0.0;
    for (const auto& c : predicted.point) tau_empty_ += c.weight * (1.0 - pd);
    for (const auto& c : predicted.extended) {
        const double zero_det =
            std::exp(c.gamma_shape * (std::log(c.gamma_rate) - std::log(c.gamma_rate + 1.0)));
        tau_empty_ += c.traj.weight * ((1.0 - pd) + pd * zero_det);
    }

    log_tau_.assign(1u << count_, kNegInf);
    log_kappa_tau_.assign(1u << count_, kNegInf);
    const double log_pd = pd > 0.0 ? std::log(pd) : kNegInf;
    std::vector<int> base(static_cast<std::size_t>(count_));
    std::iota(base.begin(), base.end(), 0);
    for (std::uint32_t mask = 1; mask <= full_mask_ && full_mask_ != 0; ++mask) {
        const auto idx = mask_to_indices(mask, base);
        Mat cell(z.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) cell.col(static_cast<Eigen::Index>(i)) = z.col(idx[i]);

        std::vector<double> terms;
        for (const auto& c : predicted.extended)
            if (c.traj.weight > 0.0 && pd > 0.0)
                terms.push_back(std::log(c.traj.weight) + log_pd +
                                log_cell_predictive_extended(cell, c, model));
        if (idx.size() == 1) {
            for (const auto& c : predicted.point)
                if (c.weight > 0.0 && pd > 0.0)
                    terms.push_back(std::log(c.weight) + log_pd +
                                    log_cell_predictive_point(cell, c, model));
        }
        log_tau_[mask] = log_sum_exp(terms);

        double kappa = 0.0;
        if (idx.size() == 1) kappa = model.clutter_at(z.col(idx[0]));
        log_kappa_tau_[mask] =
            kappa > 0.0 ? log_sum_exp(log_tau_[mask], std::log(kappa)) : log_tau_[mask];
    }
}

double MeasurementDensityOracle::log_density(std::uint32_t mask) const {
    if (mask > full_mask_)
        throw std::invalid_argument("MeasurementDensityOracle: mask out of range");
    // Remap the selected elements into a compact index range.
    std::vector<int> base;
    for (int i = 0; i < count_; ++i)
        if (mask & (1u << i)) base.push_back(i);
    const int m = static_cast<int>(base.size());

    std::vector<double> log_compact(1u << m, kNegInf);
    for (std::uint32_t cm = 1; cm < log_compact.size(); ++cm) {
        std::uint32_t orig = 0;
        for (int i = 0; i < m; ++i)
            if (cm & (1u << i)) orig |= 1u << base[static_cast<std::size_t>(i)];
        log_compact[cm] = log_kappa_tau_[orig];
    }

    // Per-element rescaling keeps cell products in range: a cell of size s is
    // scaled by exp(-s * alpha), so every partition of the m elements is
    // scaled by the same exp(-m * alpha).
    double alpha = 0.0;
    for (std::uint32_t cm = 1; cm < log_compact.size(); ++cm)
        if (log_compact[cm] != kNegInf)
            alpha = std::max(alpha, log_compact[cm] / popcount(cm));
    std::vector<double> scaled(log_compact.size(), 0.0);
    for (std::uint32_t cm = 1; cm < scaled.size(); ++cm)
        scaled[cm] = std::exp(log_compact[cm] - popcount(cm) * alpha);

    const double total = partition_sum(m == 0 ? 0u : ((1u << m) - 1u), scaled);
    return -clutter_rate_ - prior_mass_ + tau_empty_ + std::log(total) + m * alpha;
}

double MeasurementDensityOracle::posterior_mass() const {
    double mass = tau_empty_;
    const double log_full = log_density_full();
    for (std::uint32_t w = 1; w <= full_mask_ && full_mask_ != 0; ++w) {
        if (log_tau_[w] == kNegInf) continue;
        mass += std::exp(log_tau_[w] + log_density(full_mask_ & ~w) - log_full);
    }
    return mass;
}

}  // namespace tphd::oracle
