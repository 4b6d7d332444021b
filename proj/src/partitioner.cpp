#include "tphd/partitioner.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace tphd {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

Partition components_at(const Mat& z, const Mat& dist2, double eps) {
    const int m = static_cast<int>(z.cols());
    UnionFind uf(m);
    const double eps2 = eps * eps;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (dist2(i, j) <= eps2) uf.merge(i, j);
    std::map<int, Cell> cells;
    for (int i = 0; i < m; ++i) cells[uf.find(i)].push_back(i);
    Partition p;
    for (auto& [root, cell] : cells) p.push_back(std::move(cell));
    canonicalize(p);
    return p;
}

}  // namespace

std::vector<Partition> dbscan_sweep(const Mat& z, double eps_min, double eps_max, double step) {
    if (!(step > 0.0) || eps_min > eps_max)
        throw std::invalid_argument("dbscan_sweep: need step > 0 and eps_min <= eps_max");
    const int m = static_cast<int>(z.cols());
    if (m == 0) return {Partition{}};

    Mat dist2(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) dist2(i, j) = (z.col(i) - z.col(j)).squaredNorm();

    std::vector<double> thresholds;
    for (int i = 0;; ++i) {
        const double eps = eps_min + i * step;
        if (eps > eps_max + 1e-12) break;
        thresholds.push_back(eps);
    }
    if (thresholds.empty() || thresholds.back() < eps_max - 1e-12)
        thresholds.push_back(eps_max);

    std::vector<Partition> proposals;
    std::set<Partition> seen;
    for (double eps : thresholds) {
        Partition p = components_at(z, dist2, eps);
        if (seen.insert(p).second) proposals.push_back(std::move(p));
    }
    return proposals;
}

std::vector<Cell> unique_cells(const std::vector<Partition>& proposals) {
    std::set<Cell> seen;
    for (const auto& p : proposals)
        for (const auto& cell : p) seen.insert(cell);
    return {seen.begin(), seen.end()};
}

}  // namespace tphd
