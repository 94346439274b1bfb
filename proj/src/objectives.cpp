#include "sectorize/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace sectorize {

TimeMatrix mask_intervals(const TimeMatrix& t, const WeightedGraph& g) {
  if (t.mean.rows() != g.node_count())
    throw std::invalid_argument("mask_intervals: size mismatch");
  TimeMatrix out = TimeMatrix::zero(t.mean.rows());
  for (const Edge& e : g.edges()) {
    for (auto [i, j] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      if (t.has(i, j)) {
        out.mean(i, j) = t.mean(i, j);
        out.observations(i, j) = t.observations(i, j);
      }
    }
  }
  return out;
}

double speed_consistency(const ClusterPermutation& perm, const TimeMatrix& t,
                         const ScePolicy& policy) {
  if (!perm.scoreable || perm.order.size() < 2) return policy.neutral_sc;
  std::vector<double> intervals;
  intervals.reserve(perm.order.size() - 1);
  for (std::size_t i = 0; i + 1 < perm.order.size(); ++i) {
    Index u = perm.order[i];
    Index v = perm.order[i + 1];
    intervals.push_back(t.has(u, v) ? t.mean(u, v) : kMissingIntervalPenalty);
  }
  double denom = policy.member_count_denominator
                     ? static_cast<double>(perm.order.size())
                     : static_cast<double>(intervals.size());
  double mu = 0.0;
  for (double x : intervals) mu += x;
  mu /= denom;
  double var = 0.0;
  for (double x : intervals) var += (x - mu) * (x - mu);
  double sigma = std::sqrt(var / denom);
  double ratio = sigma == 0.0 ? 0.0 : sigma / mu;
  return 1.0 - std::tanh(ratio);
}

double sce(const Chromosome& c, PermutationCache& cache, const TimeMatrix& t,
           const ScePolicy& policy) {
  std::vector<std::vector<Index>> clusters = clusters_of(c);
  double sum = 0.0;
  for (const std::vector<Index>& members : clusters)
    sum += speed_consistency(cache.get(members), t, policy);
  return sum / static_cast<double>(clusters.size());
}

double dist_score(const Chromosome& c, const Eigen::MatrixXd& dissim,
                  double inter_weight, InterMode mode) {
  std::vector<std::vector<Index>> clusters = clusters_of(c);
  Index n = c.size();
  double total = 0.0;
  for (const std::vector<Index>& members : clusters) {
    double intra = 0.0;
    if (members.size() > 1) {
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
          intra += dissim(members[i], members[j]);
      intra /= static_cast<double>(members.size() * (members.size() - 1) / 2);
    }
    double inter = 0.0;
    Index outside = n - static_cast<Index>(members.size());
    if (outside > 0) {
      std::vector<bool> inside(static_cast<std::size_t>(n), false);
      for (Index m : members) inside[static_cast<std::size_t>(m)] = true;
      if (mode == InterMode::kMeanAll) {
        for (Index m : members)
          for (Index v = 0; v < n; ++v)
            if (!inside[static_cast<std::size_t>(v)]) inter += dissim(m, v);
        inter /= static_cast<double>(members.size()) *
                 static_cast<double>(outside);
      } else {
        inter = std::numeric_limits<double>::infinity();
        for (Index m : members)
          for (Index v = 0; v < n; ++v)
            if (!inside[static_cast<std::size_t>(v)])
              inter = std::min(inter, dissim(m, v));
      }
    }
    total += inter_weight * inter - intra;
  }
  return total;
}

DisimResult disim(const Chromosome& c, const Eigen::MatrixXd& dissim) {
  std::vector<std::vector<Index>> clusters = clusters_of(c);
  if (clusters.size() < 2) return {0.0, true};
  Index n = c.size();
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    std::size_t own = static_cast<std::size_t>(c.labels[i]);
    if (clusters[own].size() < 2) continue;  // singleton: scores 0
    double a = 0.0;
    for (Index m : clusters[own])
      if (m != i) a += dissim(i, m);
    a /= static_cast<double>(clusters[own].size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      if (k == own) continue;
      double mean = 0.0;
      for (Index m : clusters[k]) mean += dissim(i, m);
      mean /= static_cast<double>(clusters[k].size());
      b = std::min(b, mean);
    }
    double mx = std::max(a, b);
    if (mx > 0.0) sum += (b - a) / mx;
  }
  return {sum / static_cast<double>(n), false};
}

ObjectiveValues evaluate_objectives(const Chromosome& c,
                                    ObjectiveContext& ctx) {
  ObjectiveValues v;
  v.sce = sce(c, ctx.cache, *ctx.t, ctx.sce_policy);
  v.dist = dist_score(c, ctx.dissim, ctx.weights.dist_weight,
                      ctx.weights.inter_mode);
  v.n_clusters = cluster_count(c);
  return v;
}

DistNormalizer DistNormalizer::fit(std::span<const ObjectiveValues> values) {
  DistNormalizer n;
  if (values.empty()) return n;
  n.lo_ = n.hi_ = values[0].dist;
  for (const ObjectiveValues& v : values) {
    n.lo_ = std::min(n.lo_, v.dist);
    n.hi_ = std::max(n.hi_, v.dist);
  }
  return n;
}

double DistNormalizer::operator()(double dist) const {
  if (hi_ <= lo_) return 0.5;
  double x = (dist - lo_) / (hi_ - lo_);
  return std::clamp(x, 0.0, 1.0);
}

double weighted_fitness(double dist_normalized, double sce_value,
                        const FitnessWeights& w) {
  return w.w1 * dist_normalized + w.w2() * sce_value;
}

std::vector<double> population_fitness(std::span<const ObjectiveValues> values,
                                       const FitnessWeights& w) {
  DistNormalizer norm = DistNormalizer::fit(values);
  std::vector<double> out;
  out.reserve(values.size());
  for (const ObjectiveValues& v : values)
    out.push_back(weighted_fitness(norm(v.dist), v.sce, w));
  return out;
}

}  // namespace sectorize
