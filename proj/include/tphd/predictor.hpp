#pragma once

#include "tphd/model.hpp"

namespace tphd {

/// Birth intensity: single-step component templates injected at every
/// prediction. Template birth times are overwritten with the injection time.
struct BirthModel {
    std::vector<TrajectoryGaussian> point;
    std::vector<GgiwComponent> extended;
};

double total_mass(const BirthModel& birth);

/// Predicts the posterior at time k-1 to time k: surviving components are
/// weight-scaled, their trajectory Gaussians extended by one step, the
/// extended-target rate and extent laws forgotten toward their stationary
/// values, and birth components appended. If `next_track_id` is given, birth
/// components receive consecutive fresh ids from it.
PhdMixture predict(const PhdMixture& post, const MotionModel& motion, const BirthModel& birth,
                   int k, std::uint64_t* next_track_id = nullptr);

}  // namespace tphd
