#include "tphd/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace tphd {

AssignmentResult solve_assignment(const Mat& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw std::invalid_argument("solve_assignment: matrix must be square");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based potentials formulation.
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);  // col -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < min_slack[static_cast<std::size_t>(j)]) {
                    min_slack[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (min_slack[static_cast<std::size_t>(j)] < delta) {
                    delta = min_slack[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            if (!(delta < kInf))
                throw std::invalid_argument("solve_assignment: no finite assignment exists");
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    min_slack[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentResult result;
    result.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (match[static_cast<std::size_t>(j)] > 0)
            result.row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] =
                j - 1;
    for (int i = 0; i < n; ++i)
        result.total_cost += cost(i, result.row_to_col[static_cast<std::size_t>(i)]);
    return result;
}

}  // namespace tphd
