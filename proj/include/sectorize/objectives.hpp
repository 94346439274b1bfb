#pragma once

#include "sectorize/chromosome.hpp"
#include "sectorize/common.hpp"
#include "sectorize/ingest.hpp"
#include "sectorize/permutation.hpp"

#include <span>
#include <vector>

namespace sectorize {

// How speed consistency treats denominators and unscoreable clusters.
struct ScePolicy {
  // Divide interval mean/variance by the member count n_C rather than by the
  // interval count n_C - 1. With the member count, a perfectly regular chain
  // scores higher the longer it is (its coefficient of variation falls as
  // 1/sqrt(n(n-1))), which keeps long road sections from being rewarded for
  // splitting into fragments. The interval-count alternative scores every
  // perfectly regular chain 1.0 regardless of length.
  bool member_count_denominator = true;
  // Score for clusters with no interval sequence to judge (singletons, or no
  // observed interval at all): no consistency evidence earns no credit, so
  // shattering into singletons is never rewarded by SCE.
  double neutral_sc = 0.0;
};

// Speed consistency of one cluster: 1 - tanh(sigma/mu) over the consecutive
// intervals of its best order. Unobserved adjacencies contribute the missing
// interval penalty, so clusters only bridgeable through silence score ~0.
double speed_consistency(const ClusterPermutation& perm, const TimeMatrix& t,
                         const ScePolicy& policy = {});

// Mean speed consistency over all clusters of the partition.
double sce(const Chromosome& c, PermutationCache& cache, const TimeMatrix& t,
           const ScePolicy& policy = {});

// How the separation term of the distance objective is computed.
enum class InterMode {
  kMeanAll,   // mean dissimilarity from members to every non-member
  kMinPair,   // smallest member/non-member dissimilarity (separation gap)
};

// Σ over clusters of (inter_weight * D_inter - D_intra), where D_intra is the
// mean pairwise dissimilarity inside the cluster (0 for singletons) and
// D_inter follows `mode` (0 when the cluster is the whole node set).
double dist_score(const Chromosome& c, const Eigen::MatrixXd& dissim,
                  double inter_weight, InterMode mode = InterMode::kMeanAll);

// Silhouette-style separation report: per node (b - a) / max(a, b) with a =
// mean dissimilarity to own cluster and b = the smallest mean dissimilarity
// to another cluster; nodes in singleton clusters score 0. Reported next to
// the other objectives but never part of fitness.
struct DisimResult {
  double value = 0.0;
  bool degenerate = false;  // single-cluster partition: score pinned to 0
};
DisimResult disim(const Chromosome& c, const Eigen::MatrixXd& dissim);

// Keeps only the interval entries whose pair is an edge of `g`; everything
// else becomes unobserved. Interval evidence thus follows the same
// association-support filter as the graph itself, so rarely-associated pairs
// (overheard noise) cannot form spuriously consistent chains.
TimeMatrix mask_intervals(const TimeMatrix& t, const WeightedGraph& g);

// Weighted-sum fitness configuration. dist_weight scales the separation term
// inside the distance objective; w1 balances distance against consistency
// (w2 = 1 - w1).
struct FitnessWeights {
  // Balance chosen on the plus-crossing benchmark: above ~0.5 the distance
  // term rewards shattering long chains, below ~0.3 consistency tolerates
  // merging arms across a junction; 0.4 sits on the recovery plateau.
  double w1 = 0.4;
  double dist_weight = 0.5;
  InterMode inter_mode = InterMode::kMeanAll;

  double w2() const { return 1.0 - w1; }
};

// Raw per-chromosome objective values.
struct ObjectiveValues {
  double sce = 0.0;
  double dist = 0.0;
  int n_clusters = 0;
};

// Everything needed to score chromosomes against one thresholded view.
struct ObjectiveContext {
  const TimeMatrix* t = nullptr;  // symmetrized interval matrix
  Eigen::MatrixXd dissim;
  PermutationCache cache;
  ScePolicy sce_policy;
  FitnessWeights weights;

  ObjectiveContext(const TimeMatrix& tmat, Eigen::MatrixXd d,
                   ScePolicy policy = {}, FitnessWeights w = {})
      : t(&tmat),
        dissim(std::move(d)),
        cache(tmat),
        sce_policy(policy),
        weights(w) {}
};

ObjectiveValues evaluate_objectives(const Chromosome& c, ObjectiveContext& ctx);

// Maps raw distance values onto [0, 1] with bounds frozen at fit() time;
// later out-of-range values clamp. A degenerate range maps everything to 0.5.
class DistNormalizer {
 public:
  DistNormalizer() = default;
  static DistNormalizer fit(std::span<const ObjectiveValues> values);

  double operator()(double dist) const;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

double weighted_fitness(double dist_normalized, double sce_value,
                        const FitnessWeights& w);

// Fitness of a set of chromosomes evaluated together: distance is min-max
// normalized across exactly this set, then combined with consistency.
std::vector<double> population_fitness(std::span<const ObjectiveValues> values,
                                       const FitnessWeights& w);

}  // namespace sectorize
