#pragma once

#include "tphd/spd.hpp"

#include <cstdint>
#include <vector>

namespace tphd {

struct MetricConfig {
    double order = 2.0;           ///< exponent p
    double cutoff = 100.0;        ///< localization cutoff c (meters)
    double switch_penalty = 1.0;  ///< per full assignment change
    bool normalize_by_window = false;
};

/// Error components; each is the p-th root of its accumulated cost, so that
/// total^p = localization^p + missed^p + false_alarm^p + track_switch^p.
struct MetricResult {
    double total = 0.0;
    double localization = 0.0;
    double missed = 0.0;
    double false_alarm = 0.0;
    double track_switch = 0.0;
};

/// A position track on the evaluation window: positions[i] is the state at
/// time start + i.
struct TimedTrack {
    int start = 1;
    std::vector<Eigen::Vector2d> positions;
    std::uint64_t id = 0;

    [[nodiscard]] int end() const {
        return start + static_cast<int>(positions.size()) - 1;
    }
    [[nodiscard]] bool alive_at(int t) const { return t >= start && t <= end(); }
    [[nodiscard]] const Eigen::Vector2d& at(int t) const {
        return positions[static_cast<std::size_t>(t - start)];
    }
};

/// Per-step optimal-assignment trajectory error over the window [1, window]:
/// at every step, truth and estimate states are matched with pairwise cost
/// min(distance, cutoff)^p and an unassignment cost of cutoff^p / 2 per side;
/// assignment changes between consecutive steps add switch_penalty^p (half
/// for changes to or from unassigned). Costs accumulate per component and
/// the result reports their p-th roots, optionally after dividing the
/// accumulated costs by the window length.
MetricResult trajectory_metric(const std::vector<TimedTrack>& truth,
                               const std::vector<TimedTrack>& estimates, int window,
                               const MetricConfig& cfg);

/// Component-wise root mean square across runs. Throws on empty input.
MetricResult rms_over_runs(const std::vector<MetricResult>& runs);

}  // namespace tphd
