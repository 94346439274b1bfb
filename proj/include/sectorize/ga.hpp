#pragma once

#include "sectorize/chromosome.hpp"
#include "sectorize/common.hpp"
#include "sectorize/graph.hpp"
#include "sectorize/ingest.hpp"
#include "sectorize/objectives.hpp"

#include <random>
#include <span>
#include <vector>

namespace sectorize {

struct GAConfig {
  int pop_size = 50;        // even, at least 4
  int generations = 100;    // at least 1
  double mutation_prob = 10.0;        // percent chance per child
  double local_search_fraction = 0.2; // share of members refined each generation
  int walk_order = 4;                 // even random-walk similarity order
  int early_stop_patience = 0;        // generations without improvement; 0 = off
  std::uint64_t rng_seed = 0;
  FitnessWeights weights;
  ScePolicy sce_policy;

  void validate() const;
};

// Pivot clustering with an explicit pivot order: each unassigned pivot takes
// itself plus its unassigned neighbors with edge weight > 0.5 as one cluster.
Chromosome pkwik_cluster_with_order(const WeightedGraph& g,
                                    std::span<const Index> pivot_order);

// Pivot clustering with pivots drawn uniformly at random.
Chromosome pkwik_cluster(const WeightedGraph& g, std::mt19937_64& rng);

// Half pivot clusterings, half uniform random labelings whose cluster count
// is drawn from [2, 2*sqrt(n)]. All members canonical.
std::vector<Chromosome> init_population(const WeightedGraph& g,
                                        const GAConfig& cfg,
                                        std::mt19937_64& rng);

// One synchronous reassignment pass: against a snapshot of the partition,
// every node moves to the existing cluster with the largest summed
// similarity to its members, never counting the node itself (ties go to the
// lowest label).
Chromosome local_search(const Chromosome& c, const Eigen::MatrixXd& sim);

// Single-point crossover at a uniform cut in [1, n-1]; children canonical.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a,
                                            const Chromosome& b,
                                            std::mt19937_64& rng);

// With probability mutation_prob/100, one uniformly chosen gene is moved to
// a different label drawn from the existing labels plus one fresh label.
Chromosome mutate(const Chromosome& c, double mutation_prob,
                  std::mt19937_64& rng);

// Indices of the fittest half, fitness descending, ties by lower index.
std::vector<std::size_t> select_top_half(std::span<const double> fitness);

// One per-generation per-population trace entry.
struct TraceRow {
  int population = 0;
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_sce = 0.0;
  double best_dist = 0.0;
  int n_clusters = 0;
};

struct PopulationResult {
  double threshold = 0.0;
  Chromosome best;
  ObjectiveValues best_values;
  double best_fitness = 0.0;
  int generations_run = 0;
};

struct EvolveResult {
  Chromosome best;
  ObjectiveValues best_values;
  int best_population = 0;
  std::vector<PopulationResult> populations;
  std::vector<TraceRow> trace;
  // All thresholded views were edgeless; `best` is the all-singleton
  // fallback and no evolution took place.
  bool degenerate_graph = false;
};

// Full clustering run: six independent populations, one per threshold in
// kThresholds, each evolved on its own similarity context; the per-population
// winners are then rescored together on the lowest-threshold context and the
// fittest wins. `t` may be directed (it is symmetrized internally).
EvolveResult evolve(const ProbabilisticGraph& g, const TimeMatrix& t,
                    const GAConfig& cfg);

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

}  // namespace sectorize
