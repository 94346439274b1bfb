#pragma once

#include "sectorize/chromosome.hpp"
#include "sectorize/common.hpp"
#include "sectorize/ga.hpp"
#include "sectorize/graph.hpp"
#include "sectorize/simulator.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sectorize {

// External agreement between a predicted partition and the reference one.
struct PartitionScore {
  double ari = 0.0;     // adjusted Rand index, in [-1, 1]
  double nmi = 0.0;     // normalized mutual information, in [0, 1]
  double purity = 0.0;  // in [0, 1]
  int n_clusters_pred = 0;
  int n_clusters_true = 0;
};

// Standard contingency-table ARI/NMI/purity. Labels need not be canonical.
// Conventions for degenerate splits: when both partitions are single-cluster
// or both all-singleton, ari = nmi = 1 (they are identical); when exactly one
// side carries no information, ari = nmi = 0. Throws DataMismatchError on
// length mismatch, InputError on empty input.
PartitionScore score_partition(const Chromosome& predicted,
                               const Chromosome& truth);

// A partition carried together with the node names it labels.
struct LabeledPartition {
  NodeTable nodes;
  Chromosome labels;  // aligned with `nodes`, canonical
};

// "node,sector" CSV round-trip. Reading accepts arbitrary integer sector ids
// and canonicalizes; the header row is optional on input.
void write_partition_csv(std::ostream& os, const NodeTable& nodes,
                         const Chromosome& c);
LabeledPartition read_partition_csv(std::istream& is);

// Reorders `p` onto the node order of `nodes`. Throws DataMismatchError when
// the node sets differ.
Chromosome align_partition(const LabeledPartition& p, const NodeTable& nodes);

// Labels each node with its connected component (edge = any positive
// weight), components numbered by lowest member index.
Chromosome connected_components(const WeightedGraph& g);

// The clustering methods the comparison harness knows how to run.
enum class Method {
  kProposed,             // the full multi-population GA
  kPkwik,                // one pivot clustering of the unthresholded graph
  kThresholdComponents,  // connected components at threshold 0.5
};

std::string_view method_name(Method m);

// One full data-generation run: scenario simulated with `seed`, records
// accumulated, matrices and the probabilistic graph built.
struct PipelineData {
  RoadNetwork network;
  SimOutput sim;
  CountMatrix counts;
  Eigen::MatrixXd directed_p;   // row-max normalized counts
  TimeMatrix intervals;         // directed mean intervals
  ProbabilisticGraph graph;
  RejectionCounts rejections;
};

PipelineData run_scenario(const Scenario& scenario, std::uint64_t seed);

// Runs one method on already-ingested data. The proposed method consumes
// `ga` (with its seed replaced by `seed`); pkwik draws its pivot order from a
// dedicated stream of `seed`.
Chromosome run_method(Method m, const PipelineData& data, const GAConfig& ga,
                      std::uint64_t seed);

struct ComparisonRow {
  std::string scenario;
  Method method = Method::kProposed;
  std::uint64_t seed = 0;
  PartitionScore score;
};

// For every seed: simulate once, cluster with every method on the same data,
// score against the simulator's ground truth. Deterministic in `seeds`.
std::vector<ComparisonRow> compare_methods(const Scenario& scenario,
                                           std::span<const Method> methods,
                                           std::span<const std::uint64_t> seeds,
                                           const GAConfig& ga);

// CSV with header "scenario,method,seed,ari,nmi,purity,n_clusters".
void write_comparison_csv(std::ostream& os,
                          std::span<const ComparisonRow> rows);

// Mean and sample standard deviation per (scenario, method), in first
// appearance order.
struct MethodSummary {
  std::string scenario;
  Method method = Method::kProposed;
  int runs = 0;
  double ari_mean = 0.0, ari_sd = 0.0;
  double nmi_mean = 0.0, nmi_sd = 0.0;
  double purity_mean = 0.0, purity_sd = 0.0;
  double clusters_mean = 0.0;
};

std::vector<MethodSummary> summarize_comparison(
    std::span<const ComparisonRow> rows);

void print_comparison_table(std::ostream& os,
                            std::span<const MethodSummary> rows);

}  // namespace sectorize
