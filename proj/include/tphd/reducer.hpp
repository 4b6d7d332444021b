#pragma once

#include "tphd/model.hpp"

namespace tphd {

/// Pruning and absorption of mixture components, applied to the point and
/// extended lists independently: components with weight <= prune_threshold
/// are removed; then, greedily from the largest weight, components within
/// the survivor's current-time Mahalanobis radius (and with the same birth
/// time) are absorbed into it, summing weights but keeping the survivor's
/// parameters; finally each list is capped to the max_components largest
/// weights.
PhdMixture prune_absorb(const PhdMixture& mix, double prune_threshold,
                        double absorb_threshold, int max_components);

/// Restricts each component's updatable Gaussian window to its last `window`
/// time steps; the earlier part of the mean is kept as a frozen point
/// estimate. Components with an active window already at or below the limit
/// are untouched.
PhdMixture lscan_apply(const PhdMixture& mix, int window);

}  // namespace tphd
