#pragma once

#include "sectorize/common.hpp"

#include <vector>

namespace sectorize {

// A partition of the node set encoded as one cluster label per node, indexed
// by dense node id. Canonical form relabels clusters by first occurrence, so
// equal partitions compare equal as label vectors.
struct Chromosome {
  std::vector<int> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
  bool operator==(const Chromosome& other) const = default;
};

// First-occurrence renumbering: the first node gets label 0, the next unseen
// label becomes 1, and so on.
Chromosome canonicalized(const Chromosome& c);

bool is_canonical(const Chromosome& c);

// Number of distinct labels.
int cluster_count(const Chromosome& c);

// Member lists per cluster label; c must be canonical so label k is at
// index k. Members are ascending.
std::vector<std::vector<Index>> clusters_of(const Chromosome& c);

// All nodes in their own cluster: labels 0..n-1.
Chromosome singleton_chromosome(Index n);

}  // namespace sectorize
