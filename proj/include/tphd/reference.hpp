#pragma once

#include "tphd/model.hpp"
#include "tphd/partition.hpp"

#include <vector>

namespace tphd::reference {

/// Standard point-target TPHD update: misdetection scaling plus one updated
/// component per (measurement, component) pair with the classic
/// pD w q / (clutter + sum pD w q) weights. Coded independently of the
/// general updater; used as an equivalence oracle.
PhdMixture point_tphd_update(const PhdMixture& pred, const Mat& z,
                             const MeasurementModel& model);

/// Standard extended-target TPHD update over a partition proposal set, in
/// the classic form with per-cell evidence d_w and partition weights
/// prod d_w / sum prod d_w. Coded independently of the general updater.
PhdMixture extended_tphd_update(const PhdMixture& pred, const Mat& z,
                                const std::vector<Partition>& proposals,
                                const MeasurementModel& model);

}  // namespace tphd::reference
