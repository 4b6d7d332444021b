#pragma once

#include <cstdint>
#include <vector>

namespace tphd {

/// A cell: non-empty sorted list of measurement indices.
using Cell = std::vector<int>;

/// A partition of a measurement index set into disjoint non-empty cells.
/// Canonical form: each cell sorted ascending, cells ordered by first index.
using Partition = std::vector<Cell>;

/// Sorts cells and orders them by first element.
void canonicalize(Partition& p);

/// True if `p` consists of disjoint non-empty cells whose union is exactly
/// {base[0], ..., base[n-1]}.
bool is_valid_partition(const Partition& p, const std::vector<int>& base);

/// All set partitions of a base index set, for exhaustive small-instance
/// oracles.
struct PartitionSet {
    std::vector<int> base;
    std::vector<Partition> partitions;
};

/// Enumerates every set partition of {0, ..., n-1}; count equals the n-th
/// Bell number. Throws std::invalid_argument for n > 10 or n < 0.
PartitionSet enumerate_partitions(int n);

/// Enumerates every set partition of an arbitrary index set.
std::vector<Partition> enumerate_partitions_of(const std::vector<int>& elems);

/// Bitmask helpers for subset loops over up to 31 elements.
std::vector<int> mask_to_indices(std::uint32_t mask, const std::vector<int>& base);
std::uint32_t indices_to_mask(const Cell& cell, const std::vector<int>& base);

}  // namespace tphd
