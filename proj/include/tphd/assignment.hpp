#pragma once

#include "tphd/spd.hpp"

#include <vector>

namespace tphd {

/// Minimum-cost perfect assignment on a square cost matrix (Jonker-style
/// shortest augmenting paths with potentials). Entries may be +infinity for
/// forbidden pairs as long as a finite assignment exists. Returns the column
/// assigned to each row and the total cost.
struct AssignmentResult {
    std::vector<int> row_to_col;
    double total_cost = 0.0;
};

AssignmentResult solve_assignment(const Mat& cost);

}  // namespace tphd
