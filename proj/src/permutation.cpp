#include "sectorize/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sectorize {

double permutation_diss(std::span<const Index> order, const TimeMatrix& t,
                        double t_ref) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    Index u = order[i];
    Index v = order[i + 1];
    sum += t.has(u, v) ? std::abs(t.mean(u, v) - t_ref)
                       : kMissingIntervalPenalty;
  }
  return sum;
}

namespace {

// Prim's MST on a dense weight matrix; ties broken by the lower vertex index.
std::vector<std::pair<int, int>> minimum_spanning_tree(
    const Eigen::MatrixXd& w) {
  int n = static_cast<int>(w.rows());
  std::vector<bool> in_tree(n, false);
  std::vector<double> key(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  key[0] = 0.0;
  std::vector<std::pair<int, int>> edges;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!in_tree[i] && (u == -1 || key[i] < key[u])) u = i;
    in_tree[u] = true;
    if (parent[u] >= 0) edges.emplace_back(parent[u], u);
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v] && w(u, v) < key[v]) {
        key[v] = w(u, v);
        parent[v] = u;
      }
    }
  }
  return edges;
}

// Greedy minimum-weight perfect matching over the given vertices (even
// count): repeatedly take the cheapest still-unmatched pair.
std::vector<std::pair<int, int>> greedy_matching(const Eigen::MatrixXd& w,
                                                 const std::vector<int>& odd) {
  struct Cand {
    double w;
    int u, v;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < odd.size(); ++i)
    for (std::size_t j = i + 1; j < odd.size(); ++j)
      cands.push_back({w(odd[i], odd[j]), odd[i], odd[j]});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  std::vector<bool> used(static_cast<std::size_t>(w.rows()), false);
  std::vector<std::pair<int, int>> matching;
  for (const Cand& c : cands) {
    if (used[c.u] || used[c.v]) continue;
    used[c.u] = used[c.v] = true;
    matching.emplace_back(c.u, c.v);
  }
  return matching;
}

// Hierholzer's algorithm. Every vertex has even degree and the multigraph is
// connected, so a closed Eulerian circuit exists.
std::vector<int> euler_circuit(int n,
                               const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].first].emplace_back(edges[e].second, e);
    adj[edges[e].second].emplace_back(edges[e].first, e);
  }
  std::vector<bool> used(edges.size(), false);
  std::vector<std::size_t> next(n, 0);
  std::vector<int> stack{0};
  std::vector<int> circuit;
  while (!stack.empty()) {
    int v = stack.back();
    std::size_t& i = next[v];
    while (i < adj[v].size() && used[adj[v][i].second]) ++i;
    if (i == adj[v].size()) {
      circuit.push_back(v);
      stack.pop_back();
    } else {
      used[adj[v][i].second] = true;
      stack.push_back(adj[v][i].first);
    }
  }
  circuit.pop_back();  // closing vertex repeats the start
  return circuit;
}

double cycle_weight(const Eigen::MatrixXd& w, const std::vector<int>& cycle) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cycle.size(); ++i)
    sum += w(cycle[i], cycle[(i + 1) % cycle.size()]);
  return sum;
}

// First-occurrence shortcut of the circuit, starting at `offset`.
std::vector<int> shortcut(const std::vector<int>& circuit, std::size_t offset,
                          int n) {
  std::vector<bool> seen(n, false);
  std::vector<int> cycle;
  cycle.reserve(n);
  for (std::size_t k = 0; k < circuit.size(); ++k) {
    int v = circuit[(offset + k) % circuit.size()];
    if (!seen[v]) {
      seen[v] = true;
      cycle.push_back(v);
    }
  }
  return cycle;
}

double path_weight(const std::vector<int>& p, const Eigen::MatrixXd& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) sum += w(p[i], p[i + 1]);
  return sum;
}

// One pass of 2-opt segment reversals; reversing path[i..j] only swaps the
// boundary edges (i-1,i) and (j,j+1). Returns whether anything improved.
bool two_opt_pass(std::vector<int>& path, const Eigen::MatrixXd& w) {
  std::size_t n = path.size();
  bool improved = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // full reversal changes nothing
      double before = 0.0, after = 0.0;
      if (i > 0) {
        before += w(path[i - 1], path[i]);
        after += w(path[i - 1], path[j]);
      }
      if (j + 1 < n) {
        before += w(path[j], path[j + 1]);
        after += w(path[i], path[j + 1]);
      }
      if (after < before - 1e-12) {
        std::reverse(path.begin() + static_cast<std::ptrdiff_t>(i),
                     path.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        improved = true;
      }
    }
  }
  return improved;
}

// Tries to move one node to another position; applies the first strict
// improvement found and reports it.
bool relocate_once(std::vector<int>& path, const Eigen::MatrixXd& w) {
  double cost = path_weight(path, w);
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::vector<int> rest = path;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t m = 0; m <= rest.size(); ++m) {
      if (m == k) continue;  // reinserting where it came from
      std::vector<int> cand = rest;
      cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(m), path[k]);
      if (path_weight(cand, w) < cost - 1e-12) {
        path = std::move(cand);
        return true;
      }
    }
  }
  return false;
}

// Alternating 2-opt and single-node relocation until neither improves.
// Strict improvements only, so the loop terminates.
void polish_path(std::vector<int>& path, const Eigen::MatrixXd& w) {
  for (;;) {
    while (two_opt_pass(path, w)) {
    }
    if (!relocate_once(path, w)) return;
  }
}

bool extend_zero_path(const std::vector<std::vector<int>>& adj,
                      std::vector<int>& path, std::vector<bool>& visited,
                      int& budget) {
  if (--budget < 0) return false;
  if (path.size() == adj.size()) return true;
  for (int v : adj[static_cast<std::size_t>(path.back())]) {
    if (visited[static_cast<std::size_t>(v)]) continue;
    visited[static_cast<std::size_t>(v)] = true;
    path.push_back(v);
    if (extend_zero_path(adj, path, visited, budget)) return true;
    path.pop_back();
    visited[static_cast<std::size_t>(v)] = false;
  }
  return false;
}

// Backtracking search for a Hamiltonian path in the given subgraph. Spends
// at most a fixed expansion budget, so dense subgraphs on large clusters
// give up (empty result) instead of stalling.
std::vector<int> hamiltonian_path(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> deg1;
  for (int v = 0; v < n; ++v) {
    if (adj[static_cast<std::size_t>(v)].empty()) return {};
    if (adj[static_cast<std::size_t>(v)].size() == 1) deg1.push_back(v);
  }
  if (deg1.size() > 2) return {};  // degree-1 nodes must be endpoints
  std::vector<int> starts = deg1;
  if (starts.empty())
    for (int v = 0; v < n; ++v) starts.push_back(v);
  int budget = 4096;
  for (int s : starts) {
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    std::vector<int> path{s};
    visited[static_cast<std::size_t>(s)] = true;
    if (extend_zero_path(adj, path, visited, budget)) return path;
    if (budget <= 0) break;
  }
  return {};
}

}  // namespace

std::vector<Index> path_tsp(const Eigen::MatrixXd& weights) {
  int n = static_cast<int>(weights.rows());
  if (n <= 0) return {};
  if (n == 1) return {0};
  if (n == 2) return {0, 1};

  std::vector<std::pair<int, int>> edges = minimum_spanning_tree(weights);
  std::vector<int> degree(n, 0);
  for (auto [u, v] : edges) {
    ++degree[u];
    ++degree[v];
  }
  std::vector<int> odd;
  for (int v = 0; v < n; ++v)
    if (degree[v] % 2 == 1) odd.push_back(v);
  for (auto [u, v] : greedy_matching(weights, odd)) edges.emplace_back(u, v);

  std::vector<int> circuit = euler_circuit(n, edges);

  // The shortcut depends on where the circuit is entered; trying every
  // rotation costs O(n^2) here and often lands on a noticeably lighter cycle.
  std::vector<int> best_cycle;
  double best_w = std::numeric_limits<double>::infinity();
  for (std::size_t offset = 0; offset < circuit.size(); ++offset) {
    std::vector<int> cycle = shortcut(circuit, offset, n);
    double cw = cycle_weight(weights, cycle);
    if (cw < best_w) {
      best_w = cw;
      best_cycle = std::move(cycle);
    }
  }

  // Break the cycle at its heaviest edge to get a path.
  std::size_t cut = 0;
  double heaviest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < best_cycle.size(); ++i) {
    double cw =
        weights(best_cycle[i], best_cycle[(i + 1) % best_cycle.size()]);
    if (cw > heaviest) {
      heaviest = cw;
      cut = i;
    }
  }
  std::vector<int> path;
  path.reserve(static_cast<std::size_t>(n));
  for (std::size_t k = 1; k <= best_cycle.size(); ++k)
    path.push_back(best_cycle[(cut + k) % best_cycle.size()]);
  polish_path(path, weights);
  return {path.begin(), path.end()};
}

ClusterPermutation best_permutation(std::span<const Index> cluster,
                                    const TimeMatrix& t) {
  ClusterPermutation result;
  result.order.assign(cluster.begin(), cluster.end());
  std::size_t n = cluster.size();
  if (n <= 1) {
    result.scoreable = false;
    return result;
  }

  // Candidate reference intervals: every distinct observed intra-cluster
  // interval (the best reference must make at least one adjacency exact).
  std::vector<double> candidates;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (t.has(cluster[i], cluster[j]))
        candidates.push_back(t.mean(cluster[i], cluster[j]));
  if (candidates.empty()) {
    result.scoreable = false;
    result.diss = static_cast<double>(n - 1) * kMissingIntervalPenalty;
    return result;
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](double a, double b) {
                                 return std::abs(a - b) < 1e-9;
                               }),
                   candidates.end());

  Eigen::MatrixXd w(n, n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> exact_adj(n);
  for (double t_ref : candidates) {
    // A chain whose every adjacency equals t_ref has zero deviation, which
    // nothing can beat; look for one exactly before running the heuristic.
    for (auto& neighbors : exact_adj) neighbors.clear();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (t.has(cluster[i], cluster[j]) &&
            std::abs(t.mean(cluster[i], cluster[j]) - t_ref) < 1e-9) {
          exact_adj[i].push_back(static_cast<int>(j));
          exact_adj[j].push_back(static_cast<int>(i));
        }
    std::vector<int> chain = hamiltonian_path(exact_adj);
    if (!chain.empty()) {
      result.order.resize(n);
      for (std::size_t k = 0; k < n; ++k)
        result.order[k] = cluster[static_cast<std::size_t>(chain[k])];
      result.t_ref = t_ref;
      result.diss = permutation_diss(result.order, t, t_ref);
      result.scoreable = true;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) {
      w(i, i) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double cost = t.has(cluster[i], cluster[j])
                          ? std::abs(t.mean(cluster[i], cluster[j]) - t_ref)
                          : kMissingIntervalPenalty;
        w(i, j) = cost;
        w(j, i) = cost;
      }
    }
    std::vector<Index> local = path_tsp(w);
    std::vector<Index> order(n);
    for (std::size_t k = 0; k < n; ++k)
      order[k] = cluster[static_cast<std::size_t>(local[k])];
    double diss = permutation_diss(order, t, t_ref);
    if (diss < best) {
      best = diss;
      result.order = std::move(order);
      result.t_ref = t_ref;
    }
  }
  result.diss = best;
  result.scoreable = true;
  return result;
}

const ClusterPermutation& PermutationCache::get(
    const std::vector<Index>& sorted_cluster) {
  auto it = cache_.find(sorted_cluster);
  if (it != cache_.end()) return it->second;
  ClusterPermutation p = best_permutation(sorted_cluster, *t_);
  return cache_.emplace(sorted_cluster, std::move(p)).first->second;
}

}  // namespace sectorize
