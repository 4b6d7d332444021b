#pragma once

#include "tphd/partition.hpp"
#include "tphd/spd.hpp"

namespace tphd {

/// Candidate partitions of the measurement columns of z from a distance-
/// threshold sweep: at each threshold the partition is the set of connected
/// components of the eps-neighborhood graph (DBSCAN with a minimum region
/// size of one point). Duplicates across thresholds are dropped; the result
/// keeps first-occurrence order. Empty input yields the single empty
/// partition.
std::vector<Partition> dbscan_sweep(const Mat& z, double eps_min, double eps_max, double step);

/// Deduplicated list of every cell appearing in any proposal, in sorted
/// order.
std::vector<Cell> unique_cells(const std::vector<Partition>& proposals);

}  // namespace tphd
