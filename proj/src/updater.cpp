#include "tphd/updater.hpp"

#include "tphd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace tphd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_det_llt(const Eigen::LLT<Mat>& llt, Eigen::Index dim) {
    double ld = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) ld += 2.0 * std::log(llt.matrixL()(i, i));
    return ld;
}

/// Per-(cell, component) quantities that are cheap to compute and sufficient
/// both for the likelihood and for materializing the updated component
/// later.
struct ExtendedCellTerms {
    Vec innovation;
    Mat innovation_cov;
    Vec whitened;  // sqrt(extent) * sqrt(S)^-1 * innovation
    double log_q = kNegInf;
};

ExtendedCellTerms extended_cell_terms(const Vec& centroid, const Mat& scatter, int n,
                                      const GgiwComponent& comp, const MeasurementModel& model) {
    const int d = comp.extent_dim();
    ExtendedCellTerms t;
    const Mat extent = comp.extent_mean();
    t.innovation = centroid - model.H * comp.traj.current_mean();
    t.innovation_cov = symmetrize(model.H * comp.traj.current_cov() * model.H.transpose() +
                                  extent / static_cast<double>(n));

    Eigen::LLT<Mat> llt_s(t.innovation_cov);
    if (llt_s.info() != Eigen::Success)
        throw std::domain_error("update: extended innovation covariance not PD");
    t.whitened = symmetric_sqrt(extent) * symmetric_sqrt(t.innovation_cov).inverse() *
                 t.innovation;

    const Mat scale_post =
        symmetrize(comp.iw_scale + t.whitened * t.whitened.transpose() + scatter);
    Eigen::LLT<Mat> llt_prior(comp.iw_scale), llt_post(scale_post), llt_x(extent);
    if (llt_post.info() != Eigen::Success)
        throw std::domain_error("update: posterior extent scale not PD");

    const double dof = comp.iw_dof;
    const double dof_post = dof + n;
    const double a = comp.gamma_shape;
    const double b = comp.gamma_rate;

    double lq = -0.5 * d * (n * std::log(std::numbers::pi) + std::log(static_cast<double>(n)));
    lq += 0.5 * (dof - d - 1.0) * log_det_llt(llt_prior, d) -
          0.5 * (dof_post - d - 1.0) * log_det_llt(llt_post, d);
    lq += log_multivariate_gamma(d, 0.5 * (dof_post - d - 1.0)) -
          log_multivariate_gamma(d, 0.5 * (dof - d - 1.0));
    lq += 0.5 * (log_det_llt(llt_x, d) - log_det_llt(llt_s, d));
    lq += std::lgamma(a + n) - std::lgamma(a) + a * std::log(b) -
          (a + n) * std::log(b + 1.0);
    t.log_q = lq;
    return t;
}

Vec cell_centroid(const Mat& cell_z) { return cell_z.rowwise().mean(); }

Mat cell_scatter(const Mat& cell_z, const Vec& centroid) {
    Mat scatter = Mat::Zero(cell_z.rows(), cell_z.rows());
    for (Eigen::Index i = 0; i < cell_z.cols(); ++i) {
        const Vec dz = cell_z.col(i) - centroid;
        scatter += dz * dz.transpose();
    }
    return scatter;
}

/// Kalman-corrects the active window of a trajectory Gaussian against an
/// innovation with covariance S.
void correct_trajectory(TrajectoryGaussian& traj, const Vec& innovation, const Mat& s,
                        const MeasurementModel& model) {
    const Mat cross = traj.cross_cov_with_current() * model.H.transpose();
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("update: innovation covariance not PD");
    const Mat gain = llt.solve(cross.transpose()).transpose();
    traj.mean.tail(traj.cov.rows()) += gain * innovation;
    traj.cov = symmetrize(traj.cov - gain * cross.transpose());
}

struct MisdetectedGamma {
    double weight_factor = 0.0;
    double shape = 1.0;
    double rate = 1.0;
};

/// Moment-matched single Gamma for the two-branch misdetection mixture
/// (missed detection, and detection with zero Poisson draws).
MisdetectedGamma moment_matched_misdetection(double shape, double rate, double pd) {
    const double zero_det = std::exp(shape * (std::log(rate) - std::log(rate + 1.0)));
    MisdetectedGamma out;
    out.weight_factor = (1.0 - pd) + pd * zero_det;
    if (!(out.weight_factor > 0.0)) {
        out.weight_factor = 0.0;
        out.shape = shape;
        out.rate = rate + 1.0;
        return out;
    }
    const double w1 = (1.0 - pd) / out.weight_factor;
    const double w2 = pd * zero_det / out.weight_factor;
    const double mean = w1 * shape / rate + w2 * shape / (rate + 1.0);
    const double second = w1 * shape * (shape + 1.0) / (rate * rate) +
                          w2 * shape * (shape + 1.0) / ((rate + 1.0) * (rate + 1.0));
    const double var = second - mean * mean;
    out.shape = mean * mean / var;
    out.rate = mean / var;
    return out;
}

}  // namespace

CellStatistics cell_statistics(const Mat& cell_z, const GgiwComponent& comp,
                               const MeasurementModel& model) {
    const int n = static_cast<int>(cell_z.cols());
    if (n < 1) throw std::invalid_argument("cell_statistics: empty cell");
    CellStatistics cs;
    cs.centroid = cell_centroid(cell_z);
    cs.scatter = cell_scatter(cell_z, cs.centroid);
    cs.extent = comp.extent_mean();
    const auto terms = extended_cell_terms(cs.centroid, cs.scatter, n, comp, model);
    cs.innovation = terms.innovation;
    cs.innovation_cov = terms.innovation_cov;
    cs.whitened_outer = terms.whitened * terms.whitened.transpose();
    cs.log_likelihood = terms.log_q;
    const Mat cross = comp.traj.cross_cov_with_current() * model.H.transpose();
    cs.gain = Eigen::LLT<Mat>(cs.innovation_cov).solve(cross.transpose()).transpose();
    return cs;
}

double log_cell_likelihood_point(const Mat& cell_z, const TrajectoryGaussian& comp,
                                 const MeasurementModel& model) {
    if (cell_z.cols() != 1)
        throw std::invalid_argument("log_cell_likelihood_point: cell must be a singleton");
    const Mat s = symmetrize(model.H * comp.current_cov() * model.H.transpose() + model.R);
    return log_gaussian(cell_z.col(0), model.H * comp.current_mean(), SymPosDef(s));
}

double log_cell_likelihood_extended(const Mat& cell_z, const GgiwComponent& comp,
                                    const MeasurementModel& model) {
    const int n = static_cast<int>(cell_z.cols());
    if (n < 1) throw std::invalid_argument("log_cell_likelihood_extended: empty cell");
    const Vec centroid = cell_centroid(cell_z);
    const Mat scatter = cell_scatter(cell_z, centroid);
    return extended_cell_terms(centroid, scatter, n, comp, model).log_q;
}

nlohmann::json UpdateDiagnostics::to_json() const {
    nlohmann::json jcells = nlohmann::json::array();
    for (std::size_t i = 0; i < cells.size(); ++i)
        jcells.push_back({{"indices", cells[i]}, {"log_evidence", log_cell_evidence[i]}});
    return nlohmann::json{{"schema_version", 1},
                          {"cells", std::move(jcells)},
                          {"partition_weights", partition_weights},
                          {"misdetection_mass", misdetection_mass},
                          {"posterior_mass", posterior_mass},
                          {"degenerate", degenerate}};
}

std::pair<PhdMixture, UpdateDiagnostics> update(const PhdMixture& pred, const Mat& z,
                                                const std::vector<Partition>& proposals,
                                                const MeasurementModel& model,
                                                const UpdateOptions& opts) {
    const int m = static_cast<int>(z.cols());
    std::vector<int> base(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) base[static_cast<std::size_t>(i)] = i;

    if (m > 0 && proposals.empty())
        throw std::invalid_argument("update: non-empty measurement set but no partitions");
    for (const auto& p : proposals)
        if (!is_valid_partition(p, base))
            throw std::invalid_argument("update: proposal is not a partition of the measurements");

    const double pd = model.detection_prob;
    const double log_pd = pd > 0.0 ? std::log(pd) : kNegInf;

    PhdMixture post;
    post.time = pred.time;
    post.state_dim = pred.state_dim;
    post.extent_dim = pred.extent_dim;

    UpdateDiagnostics diag;

    // Misdetection terms.
    for (const auto& c : pred.point) {
        TrajectoryGaussian nd = c;
        nd.weight = c.weight * (1.0 - pd);
        post.point.push_back(std::move(nd));
        diag.misdetection_mass += c.weight * (1.0 - pd);
    }
    for (const auto& c : pred.extended) {
        if (opts.split_misdetection_gamma) {
            GgiwComponent missed = c;
            missed.traj.weight = c.traj.weight * (1.0 - pd);
            const double zero_det = std::exp(
                c.gamma_shape * (std::log(c.gamma_rate) - std::log(c.gamma_rate + 1.0)));
            GgiwComponent empty_draw = c;
            empty_draw.traj.weight = c.traj.weight * pd * zero_det;
            empty_draw.gamma_rate = c.gamma_rate + 1.0;
            diag.misdetection_mass += missed.traj.weight + empty_draw.traj.weight;
            post.extended.push_back(std::move(missed));
            post.extended.push_back(std::move(empty_draw));
        } else {
            const auto mg = moment_matched_misdetection(c.gamma_shape, c.gamma_rate, pd);
            GgiwComponent nd = c;
            nd.traj.weight = c.traj.weight * mg.weight_factor;
            nd.gamma_shape = mg.shape;
            nd.gamma_rate = mg.rate;
            diag.misdetection_mass += nd.traj.weight;
            post.extended.push_back(std::move(nd));
        }
    }
    diag.posterior_mass = diag.misdetection_mass;

    if (m == 0) {
        diag.partition_weights.assign(std::max<std::size_t>(proposals.size(), 1), 1.0);
        return {std::move(post), std::move(diag)};
    }

    // Unique cells and the proposal -> cell-index table.
    std::map<Cell, int> cell_index;
    std::vector<Mat> cell_measurements;
    std::vector<std::vector<int>> proposal_cells(proposals.size());
    for (std::size_t p = 0; p < proposals.size(); ++p) {
        for (const auto& cell : proposals[p]) {
            auto [it, inserted] = cell_index.try_emplace(cell, static_cast<int>(diag.cells.size()));
            if (inserted) {
                diag.cells.push_back(cell);
                Mat cz(z.rows(), static_cast<Eigen::Index>(cell.size()));
                for (std::size_t i = 0; i < cell.size(); ++i)
                    cz.col(static_cast<Eigen::Index>(i)) = z.col(cell[i]);
                cell_measurements.push_back(std::move(cz));
            }
            proposal_cells[p].push_back(it->second);
        }
    }
    const std::size_t n_cells = diag.cells.size();
    const std::size_t n_ext = pred.extended.size();
    const std::size_t n_pt = pred.point.size();

    // Per-cell likelihood terms: log(omega * pD * q / clutter^w).
    std::vector<std::vector<ExtendedCellTerms>> ext_terms(n_cells);
    std::vector<std::vector<double>> pt_log_terms(n_cells);
    std::vector<Mat> scatters(n_cells);
    std::vector<double> log_clutters(n_cells, 0.0);
    std::vector<double> log_evidence(n_cells, kNegInf);
    for (std::size_t w = 0; w < n_cells; ++w) {
        const Mat& cz = cell_measurements[w];
        const int n = static_cast<int>(cz.cols());
        const bool singleton = n == 1;
        double log_clutter = 0.0;
        for (Eigen::Index i = 0; i < cz.cols(); ++i)
            log_clutter += std::log(model.clutter_at(cz.col(i)));
        log_clutters[w] = log_clutter;

        const Vec centroid = cell_centroid(cz);
        scatters[w] = cell_scatter(cz, centroid);

        std::vector<double> terms;
        if (singleton) terms.push_back(0.0);  // clutter-vs-target indicator

        ext_terms[w].resize(n_ext);
        for (std::size_t j = 0; j < n_ext; ++j) {
            const auto& c = pred.extended[j];
            if (c.traj.weight <= 0.0 || pd <= 0.0) continue;
            ext_terms[w][j] = extended_cell_terms(centroid, scatters[w], n, c, model);
            terms.push_back(std::log(c.traj.weight) + log_pd + ext_terms[w][j].log_q -
                            log_clutter);
        }
        if (singleton) {
            pt_log_terms[w].assign(n_pt, kNegInf);
            for (std::size_t o = 0; o < n_pt; ++o) {
                const auto& c = pred.point[o];
                if (c.weight <= 0.0 || pd <= 0.0) continue;
                pt_log_terms[w][o] = std::log(c.weight) + log_pd +
                                     log_cell_likelihood_point(cz, c, model) - log_clutter;
                terms.push_back(pt_log_terms[w][o]);
            }
        }
        log_evidence[w] = log_sum_exp(terms);
    }
    diag.log_cell_evidence = log_evidence;

    // Partition weights.
    std::vector<double> log_pw(proposals.size(), 0.0);
    for (std::size_t p = 0; p < proposals.size(); ++p)
        for (int w : proposal_cells[p]) log_pw[p] += log_evidence[static_cast<std::size_t>(w)];
    const double log_norm = log_sum_exp(log_pw);
    diag.partition_weights.assign(proposals.size(), 0.0);
    if (log_norm == kNegInf) {
        diag.degenerate = true;
        return {std::move(post), std::move(diag)};
    }
    for (std::size_t p = 0; p < proposals.size(); ++p)
        diag.partition_weights[p] = std::exp(log_pw[p] - log_norm);

    // Marginal probability that each cell is part of the explanation.
    std::vector<double> cell_marginal(n_cells, 0.0);
    for (std::size_t p = 0; p < proposals.size(); ++p)
        for (int w : proposal_cells[p])
            cell_marginal[static_cast<std::size_t>(w)] += diag.partition_weights[p];

    // Detected components.
    for (std::size_t w = 0; w < n_cells; ++w) {
        if (cell_marginal[w] <= 0.0 || log_evidence[w] == kNegInf) continue;
        const Mat& cz = cell_measurements[w];
        const int n = static_cast<int>(cz.cols());
        const bool singleton = n == 1;

        const double target_share =
            singleton ? cell_marginal[w] * (1.0 - std::exp(-log_evidence[w]))
                      : cell_marginal[w];
        diag.posterior_mass += target_share;

        for (std::size_t j = 0; j < n_ext; ++j) {
            const auto& t = ext_terms[w][j];
            if (t.log_q == kNegInf) continue;
            const auto& c = pred.extended[j];
            const double weight =
                cell_marginal[w] * std::exp(std::log(c.traj.weight) + log_pd + t.log_q -
                                            log_clutters[w] - log_evidence[w]);
            if (!(weight > opts.min_weight)) continue;
            GgiwComponent det = c;
            det.traj.weight = weight;
            correct_trajectory(det.traj, t.innovation, t.innovation_cov, model);
            det.gamma_shape = c.gamma_shape + n;
            det.gamma_rate = c.gamma_rate + 1.0;
            det.iw_dof = c.iw_dof + n;
            det.iw_scale =
                symmetrize(c.iw_scale + t.whitened * t.whitened.transpose() + scatters[w]);
            post.extended.push_back(std::move(det));
        }
        if (singleton) {
            for (std::size_t o = 0; o < n_pt; ++o) {
                if (pt_log_terms[w][o] == kNegInf) continue;
                const auto& c = pred.point[o];
                const double weight =
                    cell_marginal[w] * std::exp(pt_log_terms[w][o] - log_evidence[w]);
                if (!(weight > opts.min_weight)) continue;
                TrajectoryGaussian det = c;
                det.weight = weight;
                const Mat s =
                    symmetrize(model.H * c.current_cov() * model.H.transpose() + model.R);
                const Vec innovation = cz.col(0) - model.H * c.current_mean();
                correct_trajectory(det, innovation, s, model);
                post.point.push_back(std::move(det));
            }
        }
    }

    return {std::move(post), std::move(diag)};
}

}  // namespace tphd
