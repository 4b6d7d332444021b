#include "tphd/reducer.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace tphd {

namespace {

/// Greedy absorption over an index set; WeightOf/TrajOf adapt the two
/// component kinds.
template <typename Comp, typename WeightOf, typename TrajOf>
std::vector<Comp> reduce_list(const std::vector<Comp>& comps, double prune_threshold,
                              double absorb_threshold, int max_components, WeightOf weight_of,
                              TrajOf traj_of) {
    std::vector<int> alive;
    for (int i = 0; i < static_cast<int>(comps.size()); ++i)
        if (weight_of(comps[static_cast<std::size_t>(i)]) > prune_threshold) alive.push_back(i);

    std::vector<Comp> out;
    while (!alive.empty()) {
        int best = alive[0];
        for (int i : alive)
            if (weight_of(comps[static_cast<std::size_t>(i)]) >
                weight_of(comps[static_cast<std::size_t>(best)]))
                best = i;
        const auto& lead = traj_of(comps[static_cast<std::size_t>(best)]);
        const Vec lead_mean = lead.current_mean();
        const Mat lead_cov = lead.current_cov();
        const Eigen::LLT<Mat> llt(lead_cov);

        std::vector<int> keep;
        double merged_weight = 0.0;
        for (int i : alive) {
            const auto& traj = traj_of(comps[static_cast<std::size_t>(i)]);
            bool absorb = false;
            if (traj.birth_time == lead.birth_time) {
                const Vec diff = traj.current_mean() - lead_mean;
                absorb = diff.dot(llt.solve(diff)) <= absorb_threshold;
            }
            if (absorb)
                merged_weight += weight_of(comps[static_cast<std::size_t>(i)]);
            else
                keep.push_back(i);
        }
        Comp merged = comps[static_cast<std::size_t>(best)];
        weight_of(merged) = merged_weight;
        out.push_back(std::move(merged));
        alive = std::move(keep);
    }

    if (static_cast<int>(out.size()) > max_components) {
        std::stable_sort(out.begin(), out.end(), [&](const Comp& a, const Comp& b) {
            return weight_of(a) > weight_of(b);
        });
        out.resize(static_cast<std::size_t>(max_components));
    }
    return out;
}

}  // namespace

PhdMixture prune_absorb(const PhdMixture& mix, double prune_threshold, double absorb_threshold,
                        int max_components) {
    if (!(absorb_threshold > 0.0) || prune_threshold < 0.0 || max_components < 1)
        throw std::invalid_argument("prune_absorb: invalid thresholds");

    PhdMixture out;
    out.time = mix.time;
    out.state_dim = mix.state_dim;
    out.extent_dim = mix.extent_dim;
    out.point = reduce_list(
        mix.point, prune_threshold, absorb_threshold, max_components,
        [](auto& c) -> auto& { return c.weight; },
        [](const auto& c) -> const TrajectoryGaussian& { return c; });
    out.extended = reduce_list(
        mix.extended, prune_threshold, absorb_threshold, max_components,
        [](auto& c) -> auto& { return c.traj.weight; },
        [](const auto& c) -> const TrajectoryGaussian& { return c.traj; });
    return out;
}

namespace {

void truncate_window(TrajectoryGaussian& c, int window) {
    const int active = c.active_length();
    if (active <= window) return;
    const Eigen::Index keep = static_cast<Eigen::Index>(window) * c.state_dim;
    c.cov = Mat(c.cov.bottomRightCorner(keep, keep));
}

}  // namespace

PhdMixture lscan_apply(const PhdMixture& mix, int window) {
    if (window < 1) throw std::invalid_argument("lscan_apply: window must be >= 1");
    PhdMixture out = mix;
    for (auto& c : out.point) truncate_window(c, window);
    for (auto& c : out.extended) truncate_window(c.traj, window);
    return out;
}

}  // namespace tphd
