#pragma once

#include "tphd/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace tphd {

/// Extracted trajectory: one state per time step from birth to the mixture's
/// current time, plus the extent/rate summaries for extended targets.
struct TrajectoryEstimate {
    int birth_time = 1;
    std::vector<Vec> states;
    TargetClass target_class = TargetClass::point;
    std::optional<Mat> extent;   ///< expected extent matrix
    std::optional<double> rate;  ///< expected measurements per scan
    std::uint64_t track_id = 0;
    double weight = 0.0;
};

enum class ExtractionRule {
    round_mass,        ///< report round(total mass) top-weight components
    weight_threshold,  ///< report every component with weight > 0.5
};

std::vector<TrajectoryEstimate> extract(const PhdMixture& mix,
                                        ExtractionRule rule = ExtractionRule::round_mass);

/// Full axis widths (2 sqrt of each eigenvalue) of an extent matrix, sorted
/// descending. Throws std::domain_error if the matrix is not PD.
std::pair<double, double> extent_width(const SymPosDef& extent);

}  // namespace tphd
