#include "sectorize/ga.hpp"

#include "sectorize/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace sectorize {

void GAConfig::validate() const {
  if (pop_size < 4 || pop_size % 2 != 0)
    throw std::invalid_argument("ga: pop_size must be even and >= 4");
  if (generations < 1)
    throw std::invalid_argument("ga: generations must be >= 1");
  if (mutation_prob < 0.0 || mutation_prob > 100.0)
    throw std::invalid_argument("ga: mutation_prob must lie in [0, 100]");
  if (local_search_fraction < 0.0 || local_search_fraction > 1.0)
    throw std::invalid_argument("ga: local_search_fraction must lie in [0, 1]");
  if (walk_order < 0 || walk_order % 2 != 0)
    throw std::invalid_argument("ga: walk_order must be even and >= 0");
  if (early_stop_patience < 0)
    throw std::invalid_argument("ga: early_stop_patience must be >= 0");
  if (weights.w1 < 0.0 || weights.w1 > 1.0)
    throw std::invalid_argument("ga: w1 must lie in [0, 1]");
  if (weights.dist_weight < 0.0)
    throw std::invalid_argument("ga: dist_weight must be >= 0");
}

Chromosome pkwik_cluster_with_order(const WeightedGraph& g,
                                    std::span<const Index> pivot_order) {
  Index n = g.node_count();
  Chromosome c;
  c.labels.assign(static_cast<std::size_t>(n), -1);
  int next_label = 0;
  for (Index pivot : pivot_order) {
    if (pivot < 0 || pivot >= n)
      throw std::invalid_argument("ga: pivot index out of range");
    if (c.labels[static_cast<std::size_t>(pivot)] != -1) continue;
    c.labels[static_cast<std::size_t>(pivot)] = next_label;
    for (Index v : g.neighbors(pivot)) {
      if (c.labels[static_cast<std::size_t>(v)] == -1 &&
          g.weight(pivot, v) > 0.5)
        c.labels[static_cast<std::size_t>(v)] = next_label;
    }
    ++next_label;
  }
  for (int label : c.labels)
    if (label < 0)
      throw std::invalid_argument("ga: pivot order must cover every node");
  return canonicalized(c);
}

Chromosome pkwik_cluster(const WeightedGraph& g, std::mt19937_64& rng) {
  std::vector<Index> order(static_cast<std::size_t>(g.node_count()));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  return pkwik_cluster_with_order(g, order);
}

std::vector<Chromosome> init_population(const WeightedGraph& g,
                                        const GAConfig& cfg,
                                        std::mt19937_64& rng) {
  Index n = g.node_count();
  std::vector<Chromosome> pop;
  pop.reserve(static_cast<std::size_t>(cfg.pop_size));
  int half = cfg.pop_size / 2;
  for (int i = 0; i < half; ++i) pop.push_back(pkwik_cluster(g, rng));
  int max_clusters = std::max(
      2, static_cast<int>(2.0 * std::sqrt(static_cast<double>(n))));
  for (int i = half; i < cfg.pop_size; ++i) {
    Chromosome c;
    c.labels.resize(static_cast<std::size_t>(n));
    if (n < 2) {
      std::fill(c.labels.begin(), c.labels.end(), 0);
    } else {
      std::uniform_int_distribution<int> kdist(2, max_clusters);
      int k = kdist(rng);
      std::uniform_int_distribution<int> ldist(0, k - 1);
      for (auto& label : c.labels) label = ldist(rng);
    }
    pop.push_back(canonicalized(c));
  }
  return pop;
}

Chromosome local_search(const Chromosome& c, const Eigen::MatrixXd& sim) {
  std::vector<std::vector<Index>> clusters = clusters_of(c);
  Chromosome out = c;
  for (Index j = 0; j < c.size(); ++j) {
    int best_label = -1;
    double best_sum = -std::numeric_limits<double>::infinity();
    for (std::size_t alpha = 0; alpha < clusters.size(); ++alpha) {
      double sum = 0.0;
      // Self-similarity is no membership evidence; counting it would anchor
      // every node to its current cluster by the largest matrix entry.
      for (Index member : clusters[alpha])
        if (member != j) sum += sim(j, member);
      if (sum > best_sum) {
        best_sum = sum;
        best_label = static_cast<int>(alpha);
      }
    }
    out.labels[static_cast<std::size_t>(j)] = best_label;
  }
  return canonicalized(out);
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a,
                                            const Chromosome& b,
                                            std::mt19937_64& rng) {
  if (a.size() != b.size())
    throw std::invalid_argument("ga: crossover needs equal-length chromosomes");
  std::size_t n = a.labels.size();
  if (n < 2) return {a, b};
  std::uniform_int_distribution<std::size_t> cut_dist(1, n - 1);
  std::size_t cut = cut_dist(rng);
  Chromosome c1 = a;
  Chromosome c2 = b;
  for (std::size_t i = cut; i < n; ++i) {
    c1.labels[i] = b.labels[i];
    c2.labels[i] = a.labels[i];
  }
  return {canonicalized(c1), canonicalized(c2)};
}

Chromosome mutate(const Chromosome& c, double mutation_prob,
                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> roll(0.0, 100.0);
  if (roll(rng) >= mutation_prob) return c;
  std::size_t n = c.labels.size();
  if (n == 0) return c;
  std::uniform_int_distribution<std::size_t> gene_dist(0, n - 1);
  std::size_t gene = gene_dist(rng);
  int k = cluster_count(c);
  // Candidate labels: all existing plus one fresh, except the current value.
  std::vector<int> options;
  options.reserve(static_cast<std::size_t>(k) + 1);
  for (int label = 0; label <= k; ++label)
    if (label != c.labels[gene]) options.push_back(label);
  if (options.empty()) return c;
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  Chromosome out = c;
  out.labels[gene] = options[pick(rng)];
  return canonicalized(out);
}

std::vector<std::size_t> select_top_half(std::span<const double> fitness) {
  std::vector<std::size_t> idx(fitness.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return fitness[a] > fitness[b];
  });
  idx.resize(fitness.size() / 2);
  return idx;
}

namespace {

struct Member {
  Chromosome chromosome;
  ObjectiveValues values;
  double fitness = 0.0;
};

std::size_t best_member(const std::vector<Member>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (pop[i].fitness > pop[best].fitness) best = i;
  return best;
}

// Min-max distance bounds over `observed` plus the two degenerate partitions
// (all singletons, single cluster) scored on the same context. Without the
// anchors, a tightly clustered sample turns negligible raw distance gaps
// into full-scale normalized ones.
DistNormalizer anchored_normalizer(std::span<const ObjectiveValues> observed,
                                   ObjectiveContext& ctx) {
  std::vector<ObjectiveValues> values(observed.begin(), observed.end());
  Index n = ctx.dissim.rows();
  values.push_back(evaluate_objectives(singleton_chromosome(n), ctx));
  Chromosome whole;
  whole.labels.assign(static_cast<std::size_t>(n), 0);
  values.push_back(evaluate_objectives(whole, ctx));
  return DistNormalizer::fit(values);
}

TraceRow make_trace_row(int population, int generation,
                        const std::vector<Member>& pop) {
  TraceRow row;
  row.population = population;
  row.generation = generation;
  std::size_t best = best_member(pop);
  double mean = 0.0;
  for (const Member& m : pop) mean += m.fitness;
  row.best_fitness = pop[best].fitness;
  row.mean_fitness = mean / static_cast<double>(pop.size());
  row.best_sce = pop[best].values.sce;
  row.best_dist = pop[best].values.dist;
  row.n_clusters = pop[best].values.n_clusters;
  return row;
}

PopulationResult evolve_population(int pop_index, const WeightedGraph& sub,
                                   const TimeMatrix& t_sym,
                                   const GAConfig& cfg,
                                   std::vector<TraceRow>& trace) {
  // Self-transitions break the bipartite parity of street graphs (without
  // them adjacent lights score zero similarity); cosine normalization then
  // caps the diagonal at 1 so self-similarity cannot drown out neighbors in
  // local search, and spreads the dissimilarity map over a useful range.
  Eigen::MatrixXd sim = cosine_normalized(random_walk_similarity(
      with_self_transitions(transition_matrix(sub)), cfg.walk_order));
  // Intervals count as evidence only where this view kept the association;
  // otherwise sparse coincidental pairings let arbitrary merges chain up.
  TimeMatrix t_view = mask_intervals(t_sym, sub);
  ObjectiveContext ctx(t_view, dissimilarity(sim), cfg.sce_policy,
                       cfg.weights);

  std::mt19937_64 init_rng(derive_seed(cfg.rng_seed, pop_index, 0));
  std::vector<Chromosome> seeds = init_population(sub, cfg, init_rng);

  std::vector<Member> pop;
  pop.reserve(seeds.size());
  std::vector<ObjectiveValues> init_values;
  for (Chromosome& c : seeds) {
    Member m;
    m.chromosome = std::move(c);
    m.values = evaluate_objectives(m.chromosome, ctx);
    init_values.push_back(m.values);
    pop.push_back(std::move(m));
  }
  // Distance normalization bounds are frozen on the initial population, so
  // fitness is a fixed function of a chromosome for the rest of the run and
  // elitism keeps the best fitness monotone. The all-singleton and
  // one-cluster extremes anchor the bounds so the scale stays comparable
  // even when the sampled values cluster tightly.
  DistNormalizer norm = anchored_normalizer(init_values, ctx);
  auto refresh = [&](Member& m) {
    m.fitness = weighted_fitness(norm(m.values.dist), m.values.sce,
                                 cfg.weights);
  };
  for (Member& m : pop) refresh(m);

  trace.push_back(make_trace_row(pop_index, 0, pop));

  int ls_count = static_cast<int>(
      std::llround(cfg.local_search_fraction * cfg.pop_size));
  ls_count = std::clamp(ls_count, 0, cfg.pop_size);

  double best_so_far = pop[best_member(pop)].fitness;
  int stagnant = 0;
  int generations_run = 0;

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::mt19937_64 rng(derive_seed(cfg.rng_seed, pop_index, gen));
    Member elite = pop[best_member(pop)];

    // Refine the fittest members in place.
    std::vector<double> fitness(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = pop[i].fitness;
    std::vector<std::size_t> ranked(pop.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](std::size_t a, std::size_t b) {
                       return fitness[a] > fitness[b];
                     });
    for (int k = 0; k < ls_count; ++k) {
      Member& m = pop[ranked[static_cast<std::size_t>(k)]];
      Chromosome refined = local_search(m.chromosome, sim);
      if (refined == m.chromosome) continue;
      m.chromosome = std::move(refined);
      m.values = evaluate_objectives(m.chromosome, ctx);
      refresh(m);
    }

    // Elitist selection: fittest half become parents.
    for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = pop[i].fitness;
    std::vector<std::size_t> top = select_top_half(fitness);
    std::vector<Member> parents;
    parents.reserve(top.size());
    for (std::size_t i : top) parents.push_back(pop[i]);
    // Local search may have degraded the previous best in place; keep the
    // untouched elite so the best fitness can never move backwards.
    std::size_t best_parent = 0;
    for (std::size_t i = 1; i < parents.size(); ++i)
      if (parents[i].fitness > parents[best_parent].fitness) best_parent = i;
    if (parents[best_parent].fitness < elite.fitness)
      parents.back() = elite;

    // Children from random parent pairs fill the bottom half.
    std::vector<Member> children;
    std::size_t want = pop.size() - parents.size();
    std::uniform_int_distribution<std::size_t> pdist(0, parents.size() - 1);
    while (children.size() < want) {
      std::size_t a = pdist(rng);
      std::size_t b = pdist(rng);
      while (b == a) b = pdist(rng);
      auto [c1, c2] = crossover(parents[a].chromosome, parents[b].chromosome,
                                rng);
      for (Chromosome* c : {&c1, &c2}) {
        if (children.size() == want) break;
        Member m;
        m.chromosome = mutate(*c, cfg.mutation_prob, rng);
        m.values = evaluate_objectives(m.chromosome, ctx);
        refresh(m);
        children.push_back(std::move(m));
      }
    }

    pop = std::move(parents);
    for (Member& m : children) pop.push_back(std::move(m));

    trace.push_back(make_trace_row(pop_index, gen, pop));
    generations_run = gen;

    double best_now = pop[best_member(pop)].fitness;
    if (best_now > best_so_far + 1e-12) {
      best_so_far = best_now;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (cfg.early_stop_patience > 0 && stagnant >= cfg.early_stop_patience)
      break;
  }

  std::size_t best = best_member(pop);
  PopulationResult result;
  result.threshold = sub.threshold();
  result.best = pop[best].chromosome;
  result.best_values = pop[best].values;
  result.best_fitness = pop[best].fitness;
  result.generations_run = generations_run;
  return result;
}

}  // namespace

EvolveResult evolve(const ProbabilisticGraph& g, const TimeMatrix& t,
                    const GAConfig& cfg) {
  cfg.validate();
  TimeMatrix t_sym = symmetrize(t);
  std::vector<WeightedGraph> family = threshold_family(g);

  EvolveResult result;
  bool any_edges = false;
  for (const WeightedGraph& sub : family)
    if (!sub.edges().empty()) any_edges = true;
  if (!any_edges) {
    result.best = singleton_chromosome(g.node_count());
    result.degenerate_graph = true;
    TimeMatrix t_view = mask_intervals(t_sym, family.front());
    ObjectiveContext ctx(t_view,
                         dissimilarity(cosine_normalized(
                             random_walk_similarity(
                                 with_self_transitions(
                                     transition_matrix(family.front())),
                                 cfg.walk_order))),
                         cfg.sce_policy, cfg.weights);
    result.best_values = evaluate_objectives(result.best, ctx);
    return result;
  }

  for (std::size_t p = 0; p < family.size(); ++p)
    result.populations.push_back(evolve_population(
        static_cast<int>(p), family[p], t_sym, cfg, result.trace));

  // Rescore the per-population winners on the lowest-threshold context so
  // they compete on a common footing.
  TimeMatrix t_common = mask_intervals(t_sym, family.front());
  ObjectiveContext common(t_common,
                          dissimilarity(cosine_normalized(
                              random_walk_similarity(
                                  with_self_transitions(
                                      transition_matrix(family.front())),
                                  cfg.walk_order))),
                          cfg.sce_policy, cfg.weights);
  std::vector<ObjectiveValues> finalist_values;
  for (const PopulationResult& pr : result.populations)
    finalist_values.push_back(evaluate_objectives(pr.best, common));
  DistNormalizer norm = anchored_normalizer(finalist_values, common);
  std::vector<double> fitness;
  for (const ObjectiveValues& v : finalist_values)
    fitness.push_back(weighted_fitness(norm(v.dist), v.sce, cfg.weights));
  std::size_t winner = 0;
  for (std::size_t i = 1; i < fitness.size(); ++i)
    if (fitness[i] > fitness[winner]) winner = i;

  result.best = result.populations[winner].best;
  result.best_values = finalist_values[winner];
  result.best_population = static_cast<int>(winner);
  return result;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
  os << "population,generation,best_fitness,mean_fitness,best_sce,best_dist,"
        "n_clusters\n";
  char buf[160];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%.9g,%.9g,%d",
                  r.population, r.generation, r.best_fitness, r.mean_fitness,
                  r.best_sce, r.best_dist, r.n_clusters);
    os << buf << '\n';
  }
}

}  // namespace sectorize
