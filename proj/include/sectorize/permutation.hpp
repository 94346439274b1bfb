#pragma once

#include "sectorize/common.hpp"
#include "sectorize/ingest.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace sectorize {

// Stand-in cost for an adjacency whose interval was never observed. Large
// enough that such adjacencies are taken only when nothing else connects the
// cluster (observed intervals are a few seconds to minutes).
inline constexpr double kMissingIntervalPenalty = 1e6;

// Σ over consecutive pairs of |interval - t_ref|; pairs with no observed
// interval contribute kMissingIntervalPenalty instead. Orders shorter than
// two nodes cost 0.
double permutation_diss(std::span<const Index> order, const TimeMatrix& t,
                        double t_ref);

// Approximate minimum-weight Hamiltonian path over a complete symmetric
// weight matrix: minimum spanning tree, greedy minimum-weight matching of
// odd-degree vertices, Eulerian circuit, shortcut to a Hamiltonian cycle
// (best over circuit rotations), drop the heaviest cycle edge, then polish
// with 2-opt segment reversals and single-node relocations.
std::vector<Index> path_tsp(const Eigen::MatrixXd& weights);

// The best node order found for one cluster, with its deviation score.
struct ClusterPermutation {
  std::vector<Index> order;
  double diss = 0.0;
  double t_ref = 0.0;    // the reference interval the order was scored against
  bool scoreable = true; // false: no interval was ever observed in the cluster
};

// Tries every distinct observed intra-cluster interval as the reference
// value, solves the path problem on |interval - t_ref| edge weights, and
// returns the order with the smallest deviation. `t` must be symmetrized.
ClusterPermutation best_permutation(std::span<const Index> cluster,
                                    const TimeMatrix& t);

// Memoizes best_permutation results per cluster node set. One cache is valid
// for exactly one TimeMatrix.
class PermutationCache {
 public:
  explicit PermutationCache(const TimeMatrix& t) : t_(&t) {}

  const ClusterPermutation& get(const std::vector<Index>& sorted_cluster);

  std::size_t size() const { return cache_.size(); }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<Index>& v) const {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (Index x : v) {
        h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL;
        h *= 0x100000001b3ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };

  const TimeMatrix* t_;
  std::unordered_map<std::vector<Index>, ClusterPermutation, VecHash> cache_;
};

}  // namespace sectorize
