#include "tphd/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace tphd {

double total_mass(const BirthModel& birth) {
    double m = 0.0;
    for (const auto& c : birth.point) m += c.weight;
    for (const auto& c : birth.extended) m += c.traj.weight;
    return m;
}

namespace {

TrajectoryGaussian predict_trajectory(const TrajectoryGaussian& c, const MotionModel& motion) {
    const int nx = c.state_dim;
    if (motion.F.rows() != nx || motion.F.cols() != nx || motion.Q.rows() != nx)
        throw std::invalid_argument("predict: transition model does not match state_dim");
    const int active = c.active_length();

    TrajectoryGaussian out = c;
    out.weight = c.weight * motion.survival_prob;
    out.mean.resize(c.mean.size() + nx);
    out.mean.head(c.mean.size()) = c.mean;
    out.mean.tail(nx) = motion.F * c.current_mean();

    const Eigen::Index an = static_cast<Eigen::Index>(active) * nx;
    Mat cov(an + nx, an + nx);
    cov.topLeftCorner(an, an) = c.cov;
    const Mat cross = c.cross_cov_with_current() * motion.F.transpose();
    cov.topRightCorner(an, nx) = cross;
    cov.bottomLeftCorner(nx, an) = cross.transpose();
    cov.bottomRightCorner(nx, nx) =
        motion.F * c.current_cov() * motion.F.transpose() + motion.Q;
    out.cov = symmetrize(cov);
    return out;
}

}  // namespace

PhdMixture predict(const PhdMixture& post, const MotionModel& motion, const BirthModel& birth,
                   int k, std::uint64_t* next_track_id) {
    if (post.time != k - 1)
        throw std::invalid_argument("predict: posterior time must be k - 1");

    PhdMixture out;
    out.time = k;
    out.state_dim = post.state_dim;
    out.extent_dim = post.extent_dim;

    for (const auto& c : post.point) out.point.push_back(predict_trajectory(c, motion));

    const double decay = std::exp(-motion.dt / motion.extent_decay_time);
    for (const auto& c : post.extended) {
        GgiwComponent e;
        e.traj = predict_trajectory(c.traj, motion);
        e.gamma_shape = c.gamma_shape / motion.rate_forgetting;
        e.gamma_rate = c.gamma_rate / motion.rate_forgetting;
        const double d2 = 2.0 * c.extent_dim() + 2.0;
        e.iw_dof = d2 + decay * (c.iw_dof - d2);
        const Mat& m = motion.extent_transform;
        if (m.rows() != c.extent_dim() || m.cols() != c.extent_dim())
            throw std::invalid_argument("predict: extent transform does not match extent_dim");
        e.iw_scale = symmetrize(decay * m * c.iw_scale * m.transpose());
        out.extended.push_back(std::move(e));
    }

    for (const auto& tpl : birth.point) {
        if (tpl.length() != 1)
            throw std::invalid_argument("predict: birth templates must have length 1");
        TrajectoryGaussian b = tpl;
        b.birth_time = k;
        if (next_track_id) b.track_id = (*next_track_id)++;
        out.point.push_back(std::move(b));
    }
    for (const auto& tpl : birth.extended) {
        if (tpl.traj.length() != 1)
            throw std::invalid_argument("predict: birth templates must have length 1");
        GgiwComponent b = tpl;
        b.traj.birth_time = k;
        if (next_track_id) b.traj.track_id = (*next_track_id)++;
        out.extended.push_back(std::move(b));
    }
    return out;
}

}  // namespace tphd
