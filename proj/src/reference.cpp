#include "tphd/reference.hpp"

#include "tphd/oracle.hpp"
#include "tphd/stats.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tphd::reference {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Whole-trajectory Kalman correction, written with explicit inverses (the
/// cells are low-dimensional) rather than the updater's factorized solve.
void kalman_correct(TrajectoryGaussian& traj, const Vec& innovation, const Mat& s,
                    const Mat& h) {
    const Mat cross = traj.cov.rightCols(traj.state_dim) * h.transpose();
    const Mat gain = cross * s.inverse();
    traj.mean.tail(traj.cov.rows()) += gain * innovation;
    traj.cov = symmetrize(traj.cov - gain * cross.transpose());
}

}  // namespace

PhdMixture point_tphd_update(const PhdMixture& pred, const Mat& z,
                             const MeasurementModel& model) {
    if (!pred.extended.empty())
        throw std::invalid_argument("point_tphd_update: mixture must be point-only");
    const double pd = model.detection_prob;

    PhdMixture post;
    post.time = pred.time;
    post.state_dim = pred.state_dim;
    post.extent_dim = pred.extent_dim;
    for (const auto& c : pred.point) {
        TrajectoryGaussian nd = c;
        nd.weight = c.weight * (1.0 - pd);
        post.point.push_back(std::move(nd));
    }

    for (Eigen::Index i = 0; i < z.cols(); ++i) {
        const Vec zi = z.col(i);
        std::vector<double> likelihood(pred.point.size(), 0.0);
        double denom = model.clutter_at(zi);
        for (std::size_t o = 0; o < pred.point.size(); ++o) {
            const auto& c = pred.point[o];
            const Mat s = symmetrize(model.H * c.current_cov() * model.H.transpose() + model.R);
            likelihood[o] = std::exp(log_gaussian(zi, model.H * c.current_mean(), SymPosDef(s)));
            denom += pd * c.weight * likelihood[o];
        }
        for (std::size_t o = 0; o < pred.point.size(); ++o) {
            const auto& c = pred.point[o];
            TrajectoryGaussian det = c;
            det.weight = pd * c.weight * likelihood[o] / denom;
            const Mat s = symmetrize(model.H * c.current_cov() * model.H.transpose() + model.R);
            kalman_correct(det, zi - model.H * c.current_mean(), s, model.H);
            post.point.push_back(std::move(det));
        }
    }
    return post;
}

PhdMixture extended_tphd_update(const PhdMixture& pred, const Mat& z,
                                const std::vector<Partition>& proposals,
                                const MeasurementModel& model) {
    if (!pred.point.empty())
        throw std::invalid_argument("extended_tphd_update: mixture must be extended-only");
    const int m = static_cast<int>(z.cols());
    const double pd = model.detection_prob;

    PhdMixture post;
    post.time = pred.time;
    post.state_dim = pred.state_dim;
    post.extent_dim = pred.extent_dim;

    // Misdetection: two Gamma branches matched to a single Gamma by mean and
    // variance.
    for (const auto& c : pred.extended) {
        const double zero_det =
            std::exp(c.gamma_shape * (std::log(c.gamma_rate) - std::log(c.gamma_rate + 1.0)));
        const double factor = (1.0 - pd) + pd * zero_det;
        GgiwComponent nd = c;
        nd.traj.weight = c.traj.weight * factor;
        if (factor > 0.0) {
            const double w1 = (1.0 - pd) / factor;
            const double w2 = pd * zero_det / factor;
            const double a = c.gamma_shape;
            const double b = c.gamma_rate;
            const double mean = w1 * a / b + w2 * a / (b + 1.0);
            const double second =
                w1 * a * (a + 1.0) / (b * b) + w2 * a * (a + 1.0) / ((b + 1.0) * (b + 1.0));
            const double var = second - mean * mean;
            nd.gamma_shape = mean * mean / var;
            nd.gamma_rate = mean / var;
        } else {
            nd.gamma_rate = c.gamma_rate + 1.0;
        }
        post.extended.push_back(std::move(nd));
    }
    if (m == 0) return post;

    // Unique cells in proposal order.
    std::map<Cell, int> cell_index;
    std::vector<Cell> cells;
    std::vector<std::vector<int>> proposal_cells(proposals.size());
    for (std::size_t p = 0; p < proposals.size(); ++p)
        for (const auto& cell : proposals[p]) {
            auto [it, inserted] = cell_index.try_emplace(cell, static_cast<int>(cells.size()));
            if (inserted) cells.push_back(cell);
            proposal_cells[p].push_back(it->second);
        }

    std::vector<std::vector<double>> log_q(cells.size());
    std::vector<double> log_evidence(cells.size(), kNegInf);
    std::vector<double> log_clutter(cells.size(), 0.0);
    std::vector<Mat> cell_z(cells.size());
    for (std::size_t w = 0; w < cells.size(); ++w) {
        Mat cz(z.rows(), static_cast<Eigen::Index>(cells[w].size()));
        for (std::size_t i = 0; i < cells[w].size(); ++i) {
            cz.col(static_cast<Eigen::Index>(i)) = z.col(cells[w][i]);
            log_clutter[w] += std::log(model.clutter_at(z.col(cells[w][i])));
        }
        cell_z[w] = cz;
        log_q[w].resize(pred.extended.size(), kNegInf);
        std::vector<double> terms;
        if (cells[w].size() == 1) terms.push_back(0.0);
        for (std::size_t j = 0; j < pred.extended.size(); ++j) {
            const auto& c = pred.extended[j];
            if (c.traj.weight <= 0.0 || pd <= 0.0) continue;
            log_q[w][j] = oracle::log_cell_predictive_extended(cz, c, model);
            terms.push_back(std::log(c.traj.weight) + std::log(pd) + log_q[w][j] -
                            log_clutter[w]);
        }
        log_evidence[w] = log_sum_exp(terms);
    }

    std::vector<double> log_pw(proposals.size(), 0.0);
    for (std::size_t p = 0; p < proposals.size(); ++p)
        for (int w : proposal_cells[p]) log_pw[p] += log_evidence[static_cast<std::size_t>(w)];
    const double log_norm = log_sum_exp(log_pw);
    if (log_norm == kNegInf) return post;

    std::vector<double> cell_marginal(cells.size(), 0.0);
    for (std::size_t p = 0; p < proposals.size(); ++p)
        for (int w : proposal_cells[p])
            cell_marginal[static_cast<std::size_t>(w)] += std::exp(log_pw[p] - log_norm);

    for (std::size_t w = 0; w < cells.size(); ++w) {
        if (cell_marginal[w] <= 0.0) continue;
        const int n = static_cast<int>(cells[w].size());
        const Vec centroid = cell_z[w].rowwise().mean();
        Mat scatter = Mat::Zero(z.rows(), z.rows());
        for (Eigen::Index i = 0; i < cell_z[w].cols(); ++i) {
            const Vec dz = cell_z[w].col(i) - centroid;
            scatter += dz * dz.transpose();
        }
        for (std::size_t j = 0; j < pred.extended.size(); ++j) {
            if (log_q[w][j] == kNegInf) continue;
            const auto& c = pred.extended[j];
            const double weight =
                cell_marginal[w] * std::exp(std::log(c.traj.weight) + std::log(pd) +
                                            log_q[w][j] - log_clutter[w] - log_evidence[w]);
            GgiwComponent det = c;
            det.traj.weight = weight;
            const Mat extent = c.extent_mean();
            const Mat s = symmetrize(model.H * c.traj.current_cov() * model.H.transpose() +
                                     extent / static_cast<double>(n));
            const Vec innovation = centroid - model.H * c.traj.current_mean();
            kalman_correct(det.traj, innovation, s, model.H);
            const Vec whitened = symmetric_sqrt(extent) * symmetric_sqrt(s).inverse() * innovation;
            det.gamma_shape = c.gamma_shape + n;
            det.gamma_rate = c.gamma_rate + 1.0;
            det.iw_dof = c.iw_dof + n;
            det.iw_scale = symmetrize(c.iw_scale + whitened * whitened.transpose() + scatter);
            post.extended.push_back(std::move(det));
        }
    }
    return post;
}

}  // namespace tphd::reference
