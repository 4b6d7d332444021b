#include "tphd/metrics.hpp"

#include "tphd/assignment.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace tphd {

MetricResult trajectory_metric(const std::vector<TimedTrack>& truth,
                               const std::vector<TimedTrack>& estimates, int window,
                               const MetricConfig& cfg) {
    if (window < 1) throw std::invalid_argument("trajectory_metric: window must be >= 1");
    for (const auto& t : truth)
        if (t.start < 1 || t.end() > window)
            throw std::invalid_argument("trajectory_metric: truth track outside the window");
    for (const auto& t : estimates)
        if (t.start < 1 || t.end() > window)
            throw std::invalid_argument("trajectory_metric: estimate track outside the window");

    const double p = cfg.order;
    const double cutoff_p = std::pow(cfg.cutoff, p);
    const double switch_p = std::pow(cfg.switch_penalty, p);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    double loc_cost = 0.0, miss_cost = 0.0, false_cost = 0.0, switch_cost = 0.0;

    // Assignment of each truth track (by list index) to an estimate id, or
    // -1, at the previous step; used for the switch penalty.
    std::map<std::size_t, std::int64_t> prev_assignment;

    for (int t = 1; t <= window; ++t) {
        std::vector<std::size_t> alive_truth, alive_est;
        for (std::size_t i = 0; i < truth.size(); ++i)
            if (truth[i].alive_at(t)) alive_truth.push_back(i);
        for (std::size_t i = 0; i < estimates.size(); ++i)
            if (estimates[i].alive_at(t)) alive_est.push_back(i);
        const int n = static_cast<int>(alive_truth.size());
        const int m = static_cast<int>(alive_est.size());

        std::map<std::size_t, std::int64_t> assignment;
        if (n + m > 0) {
            // Square matrix with unassignment diagonals.
            Mat cost = Mat::Constant(n + m, n + m, kInf);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < m; ++j) {
                    const double d =
                        (truth[alive_truth[static_cast<std::size_t>(i)]].at(t) -
                         estimates[alive_est[static_cast<std::size_t>(j)]].at(t))
                            .norm();
                    cost(i, j) = std::pow(std::min(d, cfg.cutoff), p);
                }
            for (int i = 0; i < n; ++i) cost(i, m + i) = 0.5 * cutoff_p;
            for (int j = 0; j < m; ++j) cost(n + j, j) = 0.5 * cutoff_p;
            cost.bottomRightCorner(m, n).setZero();

            const auto sol = solve_assignment(cost);
            for (int i = 0; i < n; ++i) {
                const std::size_t truth_idx = alive_truth[static_cast<std::size_t>(i)];
                const int j = sol.row_to_col[static_cast<std::size_t>(i)];
                bool matched = j < m;
                if (matched) {
                    const double d = (truth[truth_idx].at(t) -
                                      estimates[alive_est[static_cast<std::size_t>(j)]].at(t))
                                         .norm();
                    // A pair at or beyond the cutoff is as bad as leaving
                    // both sides unassigned; report it that way.
                    if (d >= cfg.cutoff) matched = false;
                    if (matched) {
                        loc_cost += std::pow(d, p);
                        assignment[truth_idx] = static_cast<std::int64_t>(
                            estimates[alive_est[static_cast<std::size_t>(j)]].id);
                    }
                }
                if (!matched) {
                    miss_cost += 0.5 * cutoff_p;
                    assignment[truth_idx] = -1;
                }
            }
            // Estimates not matched to a truth (or matched beyond cutoff).
            std::vector<bool> est_used(static_cast<std::size_t>(m), false);
            for (int i = 0; i < n; ++i) {
                const int j = sol.row_to_col[static_cast<std::size_t>(i)];
                if (j < m && assignment[alive_truth[static_cast<std::size_t>(i)]] >= 0)
                    est_used[static_cast<std::size_t>(j)] = true;
            }
            for (int j = 0; j < m; ++j)
                if (!est_used[static_cast<std::size_t>(j)]) false_cost += 0.5 * cutoff_p;
        }

        for (const auto& [truth_idx, est_id] : assignment) {
            auto it = prev_assignment.find(truth_idx);
            if (it != prev_assignment.end() && it->second != est_id) {
                const bool half = it->second < 0 || est_id < 0;
                switch_cost += half ? 0.5 * switch_p : switch_p;
            }
        }
        prev_assignment = std::move(assignment);
    }

    const double norm = cfg.normalize_by_window ? static_cast<double>(window) : 1.0;
    MetricResult r;
    r.localization = std::pow(loc_cost / norm, 1.0 / p);
    r.missed = std::pow(miss_cost / norm, 1.0 / p);
    r.false_alarm = std::pow(false_cost / norm, 1.0 / p);
    r.track_switch = std::pow(switch_cost / norm, 1.0 / p);
    r.total = std::pow((loc_cost + miss_cost + false_cost + switch_cost) / norm, 1.0 / p);
    return r;
}

MetricResult rms_over_runs(const std::vector<MetricResult>& runs) {
    if (runs.empty()) throw std::invalid_argument("rms_over_runs: no runs");
    MetricResult out;
    for (const auto& r : runs) {
        out.total += r.total * r.total;
        out.localization += r.localization * r.localization;
        out.missed += r.missed * r.missed;
        out.false_alarm += r.false_alarm * r.false_alarm;
        out.track_switch += r.track_switch * r.track_switch;
    }
    const auto n = static_cast<double>(runs.size());
    out.total = std::sqrt(out.total / n);
    out.localization = std::sqrt(out.localization / n);
    out.missed = std::sqrt(out.missed / n);
    out.false_alarm = std::sqrt(out.false_alarm / n);
    out.track_switch = std::sqrt(out.track_switch / n);
    return out;
}

}  // namespace tphd
