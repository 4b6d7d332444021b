#include "tphd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tphd {

namespace {

TrajectoryEstimate estimate_from(const TrajectoryGaussian& traj) {
    TrajectoryEstimate e;
    e.birth_time = traj.birth_time;
    e.track_id = traj.track_id;
    e.weight = traj.weight;
    const int len = traj.length();
    e.states.reserve(static_cast<std::size_t>(len));
    for (int t = traj.birth_time; t < traj.birth_time + len; ++t)
        e.states.push_back(traj.state_mean_at(t));
    return e;
}

}  // namespace

std::vector<TrajectoryEstimate> extract(const PhdMixture& mix, ExtractionRule rule) {
    struct Ranked {
        double weight;
        bool extended;
        std::size_t index;
    };
    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < mix.point.size(); ++i)
        ranked.push_back({mix.point[i].weight, false, i});
    for (std::size_t i = 0; i < mix.extended.size(); ++i)
        ranked.push_back({mix.extended[i].traj.weight, true, i});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.weight > b.weight; });

    std::size_t take = 0;
    if (rule == ExtractionRule::round_mass) {
        const auto wanted = static_cast<std::size_t>(std::lround(total_mass(mix)));
        take = std::min(wanted, ranked.size());
    } else {
        while (take < ranked.size() && ranked[take].weight > 0.5) ++take;
    }

    std::vector<TrajectoryEstimate> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        if (ranked[i].extended) {
            const auto& c = mix.extended[ranked[i].index];
            TrajectoryEstimate e = estimate_from(c.traj);
            e.target_class = TargetClass::extended;
            e.extent = c.extent_mean();
            e.rate = c.mean_rate();
            out.push_back(std::move(e));
        } else {
            TrajectoryEstimate e = estimate_from(mix.point[ranked[i].index]);
            e.target_class = TargetClass::point;
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::pair<double, double> extent_width(const SymPosDef& extent) {
    Eigen::SelfAdjointEigenSolver<Mat> es(extent.mat());
    if (es.info() != Eigen::Success)
        throw std::domain_error("extent_width: eigendecomposition failed");
    const Vec ev = es.eigenvalues();
    std::vector<double> widths;
    for (Eigen::Index i = 0; i < ev.size(); ++i) widths.push_back(2.0 * std::sqrt(ev(i)));
    std::sort(widths.begin(), widths.end(), std::greater<>());
    return {widths[0], widths.size() > 1 ? widths[1] : widths[0]};
}

}  // namespace tphd
