#include "tphd/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace tphd {

void canonicalize(Partition& p) {
    for (auto& cell : p) std::sort(cell.begin(), cell.end());
    std::sort(p.begin(), p.end(),
              [](const Cell& a, const Cell& b) { return a.front() < b.front(); });
}

bool is_valid_partition(const Partition& p, const std::vector<int>& base) {
    std::vector<int> seen;
    for (const auto& cell : p) {
        if (cell.empty()) return false;
        seen.insert(seen.end(), cell.begin(), cell.end());
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
    std::vector<int> want = base;
    std::sort(want.begin(), want.end());
    return seen == want;
}

std::vector<Partition> enumerate_partitions_of(const std::vector<int>& elems) {
    std::vector<Partition> out;
    Partition current;
    // Restricted-growth recursion: element i joins an existing cell or opens
    // a new one.
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == elems.size()) {
            Partition p = current;
            canonicalize(p);
            out.push_back(std::move(p));
            return;
        }
        // Index loop: deeper levels grow `current`, which may reallocate.
        const std::size_t cells_here = current.size();
        for (std::size_t c = 0; c < cells_here; ++c) {
            current[c].push_back(elems[i]);
            self(self, i + 1);
            current[c].pop_back();
        }
        current.push_back({elems[i]});
        self(self, i + 1);
        current.pop_back();
    };
    rec(rec, 0);
    return out;
}

PartitionSet enumerate_partitions(int n) {
    if (n < 0 || n > 10)
        throw std::invalid_argument("enumerate_partitions: n must be in [0, 10]");
    PartitionSet ps;
    ps.base.resize(static_cast<std::size_t>(n));
    std::iota(ps.base.begin(), ps.base.end(), 0);
    ps.partitions = enumerate_partitions_of(ps.base);
    return ps;
}

std::vector<int> mask_to_indices(std::uint32_t mask, const std::vector<int>& base) {
    std::vector<int> out;
    for (std::size_t i = 0; i < base.size(); ++i)
        if (mask & (1u << i)) out.push_back(base[i]);
    return out;
}

std::uint32_t indices_to_mask(const Cell& cell, const std::vector<int>& base) {
    std::uint32_t mask = 0;
    for (int idx : cell) {
        auto it = std::find(base.begin(), base.end(), idx);
        if (it == base.end())
            throw std::invalid_argument("indices_to_mask: index not in base set");
        mask |= 1u << static_cast<std::uint32_t>(it - base.begin());
    }
    return mask;
}

}  // namespace tphd
