#include "sectorize/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace sectorize {
namespace {

std::uint64_t pair_key(Index u, Index v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

void check_endpoints(Index u, Index v, Index n) {
  if (u == v) throw std::invalid_argument("graph: self-loop rejected");
  if (u < 0 || v < 0 || u >= n || v >= n)
    throw std::invalid_argument("graph: node index out of range");
}

}  // namespace

Index NodeTable::insert(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  Index id = static_cast<Index>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<Index> NodeTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ProbabilisticGraph::add_edge(Index u, Index v, double p) {
  check_endpoints(u, v, node_count());
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("graph: probability must lie in (0, 1]");
  if (u > v) std::swap(u, v);
  if (!lookup_.emplace(pair_key(u, v), p).second)
    throw std::invalid_argument("graph: duplicate edge");
  edges_.push_back(Edge{u, v, p});
}

double ProbabilisticGraph::probability(Index u, Index v) const {
  auto it = lookup_.find(pair_key(u, v));
  return it == lookup_.end() ? 0.0 : it->second;
}

Eigen::MatrixXd ProbabilisticGraph::probability_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(node_count(), node_count());
  for (const Edge& e : edges_) {
    m(e.u, e.v) = e.p;
    m(e.v, e.u) = e.p;
  }
  return m;
}

void WeightedGraph::add_edge(Index u, Index v, double w) {
  check_endpoints(u, v, node_count());
  if (!(w > 0.0) || w > 1.0)
    throw std::invalid_argument("graph: weight must lie in (0, 1]");
  if (u > v) std::swap(u, v);
  if (!lookup_.emplace(pair_key(u, v), w).second)
    throw std::invalid_argument("graph: duplicate edge");
  edges_.push_back(Edge{u, v, w});
  adjacency_[static_cast<std::size_t>(u)].push_back(v);
  adjacency_[static_cast<std::size_t>(v)].push_back(u);
  std::sort(adjacency_[static_cast<std::size_t>(u)].begin(),
            adjacency_[static_cast<std::size_t>(u)].end());
  std::sort(adjacency_[static_cast<std::size_t>(v)].begin(),
            adjacency_[static_cast<std::size_t>(v)].end());
}

double WeightedGraph::weight(Index u, Index v) const {
  auto it = lookup_.find(pair_key(u, v));
  return it == lookup_.end() ? 0.0 : it->second;
}

Eigen::MatrixXd WeightedGraph::weight_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(node_count(), node_count());
  for (const Edge& e : edges_) {
    m(e.u, e.v) = e.p;
    m(e.v, e.u) = e.p;
  }
  return m;
}

WeightedGraph apply_threshold(const ProbabilisticGraph& g, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw std::invalid_argument("graph: threshold must lie in (0, 1]");
  WeightedGraph out(g.nodes(), threshold);
  for (const Edge& e : g.edges())
    if (e.p >= threshold) out.add_edge(e.u, e.v, e.p);
  return out;
}

std::vector<WeightedGraph> threshold_family(const ProbabilisticGraph& g) {
  std::vector<WeightedGraph> out;
  out.reserve(kThresholds.size());
  for (double t : kThresholds) out.push_back(apply_threshold(g, t));
  return out;
}

void save_edge_list(const ProbabilisticGraph& g, std::ostream& os) {
  os << "#nodes " << g.node_count() << '\n';
  for (Index i = 0; i < g.node_count(); ++i)
    os << "#node " << g.nodes().name(i) << '\n';
  char buf[32];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.6f", e.p);
    os << g.nodes().name(e.u) << ' ' << g.nodes().name(e.v) << ' ' << buf
       << '\n';
  }
}

ProbabilisticGraph load_edge_list(std::istream& is) {
  NodeTable nodes;
  struct RawEdge {
    std::string u, v;
    double p;
  };
  std::vector<RawEdge> raw;
  Index declared = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream ls(t);
    if (t[0] == '#') {
      std::string tag;
      ls >> tag;
      if (tag == "#nodes") {
        if (!(ls >> declared) || declared < 0)
          throw InputError("graph file line " + std::to_string(lineno) +
                           ": bad #nodes header");
      } else if (tag == "#node") {
        std::string name;
        if (!(ls >> name))
          throw InputError("graph file line " + std::to_string(lineno) +
                           ": bad #node line");
        nodes.insert(name);
      }
      continue;  // other # lines are comments
    }
    RawEdge e;
    if (!(ls >> e.u >> e.v >> e.p))
      throw InputError("graph file line " + std::to_string(lineno) +
                       ": expected 'u v p'");
    raw.push_back(std::move(e));
  }
  for (const RawEdge& e : raw) {
    nodes.insert(e.u);
    nodes.insert(e.v);
  }
  if (declared >= 0 && declared != nodes.size())
    throw InputError("graph file: #nodes " + std::to_string(declared) +
                     " does not match " + std::to_string(nodes.size()) +
                     " distinct nodes");
  ProbabilisticGraph g(std::move(nodes));
  for (const RawEdge& e : raw) {
    Index u = *g.nodes().find(e.u);
    Index v = *g.nodes().find(e.v);
    try {
      g.add_edge(u, v, e.p);
    } catch (const std::invalid_argument& err) {
      throw InputError(std::string("graph file: ") + err.what());
    }
  }
  return g;
}

void save_dot(const ProbabilisticGraph& g, std::ostream& os) {
  os << "graph association {\n";
  for (Index i = 0; i < g.node_count(); ++i)
    os << "  \"" << g.nodes().name(i) << "\";\n";
  char buf[32];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.3f", e.p);
    os << "  \"" << g.nodes().name(e.u) << "\" -- \"" << g.nodes().name(e.v)
       << "\" [label=\"" << buf << "\"];\n";
  }
  os << "}\n";
}

}  // namespace sectorize
