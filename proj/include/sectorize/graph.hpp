#pragma once

#include "sectorize/common.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sectorize {

// Bijective mapping between stable node names (the simulated radio MACs) and
// dense indices 0..size()-1. Indices are assigned in insertion order.
class NodeTable {
 public:
  // Returns the index of `name`, inserting it if new.
  Index insert(const std::string& name);
  std::optional<Index> find(const std::string& name) const;
  const std::string& name(Index i) const { return names_.at(i); }
  Index size() const { return static_cast<Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  bool operator==(const NodeTable& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
};

// Undirected edge between dense node indices, stored with u < v.
struct Edge {
  Index u = 0;
  Index v = 0;
  double p = 0.0;  // association probability in (0, 1]
};

// Undirected graph whose edges carry existence probabilities in (0, 1].
// Self-loops are rejected; absent pairs simply have no edge.
class ProbabilisticGraph {
 public:
  ProbabilisticGraph() = default;
  explicit ProbabilisticGraph(NodeTable nodes) : nodes_(std::move(nodes)) {}

  // Adds the undirected edge {u, v}. Throws std::invalid_argument on
  // self-loops, out-of-range indices, p outside (0, 1], or duplicates.
  void add_edge(Index u, Index v, double p);

  const NodeTable& nodes() const { return nodes_; }
  Index node_count() const { return nodes_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  // Probability of edge {u, v}; 0 when absent.
  double probability(Index u, Index v) const;
  bool has_edge(Index u, Index v) const { return probability(u, v) > 0.0; }

  // Dense symmetric matrix of edge probabilities, zero diagonal.
  Eigen::MatrixXd probability_matrix() const;

 private:
  NodeTable nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, double> lookup_;
};

// Deterministic weighted view of a ProbabilisticGraph: every edge whose
// probability reached the threshold, with the probability kept as weight.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(NodeTable nodes, double threshold)
      : nodes_(std::move(nodes)), threshold_(threshold) {
    adjacency_.resize(static_cast<std::size_t>(nodes_.size()));
  }

  void add_edge(Index u, Index v, double w);

  const NodeTable& nodes() const { return nodes_; }
  Index node_count() const { return nodes_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  double threshold() const { return threshold_; }

  double weight(Index u, Index v) const;
  bool has_edge(Index u, Index v) const { return weight(u, v) > 0.0; }

  // Neighbors of u, ascending by index.
  const std::vector<Index>& neighbors(Index u) const {
    return adjacency_.at(static_cast<std::size_t>(u));
  }

  // Dense symmetric weight matrix, zero diagonal.
  Eigen::MatrixXd weight_matrix() const;

 private:
  NodeTable nodes_;
  double threshold_ = 0.0;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, double> lookup_;
  std::vector<std::vector<Index>> adjacency_;
};

// Keeps every edge with p >= threshold (boundary included); weights equal the
// source probabilities exactly. The node set is preserved even when nodes
// end up isolated.
WeightedGraph apply_threshold(const ProbabilisticGraph& g, double threshold);

// The six standard thresholds, ascending.
inline constexpr std::array<double, 6> kThresholds{0.3, 0.4, 0.5,
                                                   0.6, 0.7, 0.8};

// One thresholded view per entry of kThresholds, in the same order.
std::vector<WeightedGraph> threshold_family(const ProbabilisticGraph& g);

// Text round-trip: a "#nodes N" header, one "#node NAME" line per node in
// index order, then one "U V P" edge line per edge (names, p with six
// decimals).
void save_edge_list(const ProbabilisticGraph& g, std::ostream& os);
ProbabilisticGraph load_edge_list(std::istream& is);

// Graphviz export for eyeballing; edges labelled with their probability.
void save_dot(const ProbabilisticGraph& g, std::ostream& os);

}  // namespace sectorize
