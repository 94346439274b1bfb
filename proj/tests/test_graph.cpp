#include "sectorize/graph.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace sectorize;

namespace {

NodeTable make_nodes(int n) {
  NodeTable t;
  for (int i = 0; i < n; ++i) t.insert("L" + std::to_string(i));
  return t;
}

ProbabilisticGraph random_graph(int n, double edge_prob,
                                std::mt19937_64& rng) {
  ProbabilisticGraph g(make_nodes(n));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (coin(rng) < edge_prob) {
        double p = coin(rng);
        if (p == 0.0) p = 0.5;
        g.add_edge(u, v, p);
      }
  return g;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("node table assigns indices in insertion order") {
  NodeTable t;
  CHECK(t.insert("a") == 0);
  CHECK(t.insert("b") == 1);
  CHECK(t.insert("a") == 0);  // repeated insert is a lookup
  CHECK(t.size() == 2);
  CHECK(t.name(1) == "b");
  CHECK(t.find("b").value() == 1);
  CHECK(!t.find("zz").has_value());
}

TEST_CASE("add_edge validates inputs") {
  ProbabilisticGraph g(make_nodes(3));
  CHECK_THROWS_AS(g.add_edge(0, 0, 0.5), std::invalid_argument);  // self loop
  CHECK_THROWS_AS(g.add_edge(0, 3, 0.5), std::invalid_argument);  // range
  CHECK_THROWS_AS(g.add_edge(0, 1, 0.0), std::invalid_argument);  // p = 0
  CHECK_THROWS_AS(g.add_edge(0, 1, 1.5), std::invalid_argument);  // p > 1
  g.add_edge(0, 1, 1.0);
  CHECK_THROWS_AS(g.add_edge(1, 0, 0.3), std::invalid_argument);  // duplicate
  CHECK(g.probability(1, 0) == 1.0);  // order-insensitive lookup
  CHECK(g.probability(1, 2) == 0.0);
}

TEST_CASE("probability matrix is symmetric with zero diagonal") {
  ProbabilisticGraph g(make_nodes(3));
  g.add_edge(0, 1, 0.25);
  g.add_edge(1, 2, 0.75);
  Eigen::MatrixXd m = g.probability_matrix();
  CHECK(m(0, 1) == 0.25);
  CHECK(m(1, 0) == 0.25);
  CHECK(m(2, 1) == 0.75);
  CHECK(m(0, 2) == 0.0);
  for (Index i = 0; i < 3; ++i) CHECK(m(i, i) == 0.0);
}

TEST_CASE("apply_threshold keeps boundary edges and all nodes") {
  ProbabilisticGraph g(make_nodes(4));
  g.add_edge(0, 1, 0.3);
  g.add_edge(1, 2, 0.29999);
  g.add_edge(2, 3, 0.8);
  WeightedGraph w = apply_threshold(g, 0.3);
  CHECK(w.node_count() == 4);          // isolated nodes preserved
  CHECK(w.edges().size() == 2);
  CHECK(w.weight(0, 1) == 0.3);        // p >= lambda includes equality
  CHECK(w.weight(1, 2) == 0.0);
  CHECK(w.weight(2, 3) == 0.8);        // weights are the source probabilities
  CHECK(w.threshold() == 0.3);
  CHECK_THROWS_AS(apply_threshold(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_threshold(g, 1.1), std::invalid_argument);
}

TEST_CASE("neighbors are ascending by index") {
  ProbabilisticGraph g(make_nodes(4));
  g.add_edge(2, 3, 0.9);
  g.add_edge(0, 2, 0.9);
  g.add_edge(1, 2, 0.9);
  WeightedGraph w = apply_threshold(g, 0.5);
  CHECK(w.neighbors(2) == std::vector<Index>{0, 1, 3});
}

TEST_CASE("threshold family is nested: higher lambda is a subset") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng() % 49);
    ProbabilisticGraph g = random_graph(n, 0.2, rng);
    std::vector<WeightedGraph> family = threshold_family(g);
    REQUIRE(family.size() == kThresholds.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
      CHECK(family[i].threshold() == kThresholds[i]);
      // every edge of a stricter view exists in every looser view, with the
      // same weight, which must equal the source probability
      for (const Edge& e : family[i].edges()) {
        CHECK(e.p == g.probability(e.u, e.v));
        CHECK(e.p >= kThresholds[i]);
        for (std::size_t j = 0; j < i; ++j)
          CHECK(family[j].weight(e.u, e.v) == e.p);
      }
    }
    // edge counts are non-increasing in lambda
    for (std::size_t i = 1; i < family.size(); ++i)
      CHECK(family[i].edges().size() <= family[i - 1].edges().size());
  }
}

TEST_CASE("edge list round-trips through text") {
  std::mt19937_64 rng(21);
  ProbabilisticGraph g = random_graph(12, 0.4, rng);
  std::stringstream ss;
  save_edge_list(g, ss);
  ProbabilisticGraph back = load_edge_list(ss);
  CHECK(back.nodes() == g.nodes());
  REQUIRE(back.edges().size() == g.edges().size());
  for (const Edge& e : g.edges())
    CHECK(back.probability(e.u, e.v) == doctest::Approx(e.p).epsilon(1e-6));
}

TEST_CASE("edge list loader rejects malformed input") {
  std::stringstream bad("#nodes 2\n#node a\n#node b\na b 1.5\n");
  CHECK_THROWS_AS(load_edge_list(bad), InputError);
  std::stringstream unknown("#nodes 2\n#node a\n#node b\na c 0.5\n");
  CHECK_THROWS_AS(load_edge_list(unknown), InputError);
}

TEST_CASE("dot export names every node and edge") {
  ProbabilisticGraph g(make_nodes(2));
  g.add_edge(0, 1, 0.5);
  std::stringstream ss;
  save_dot(g, ss);
  std::string text = ss.str();
  CHECK(text.find("\"L0\"") != std::string::npos);
  CHECK(text.find("--") != std::string::npos);
}

}  // TEST_SUITE
