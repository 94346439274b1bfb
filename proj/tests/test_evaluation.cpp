#include "sectorize/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

using namespace sectorize;

namespace {

// Independent adjusted-Rand reference: direct pair counting instead of the
// contingency-table combinatorics.
double pair_counting_ari(const Chromosome& p, const Chromosome& t) {
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  std::size_t n = p.labels.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool same_p = p.labels[i] == p.labels[j];
      bool same_t = t.labels[i] == t.labels[j];
      if (same_p && same_t) ++n11;
      else if (same_p) ++n10;
      else if (same_t) ++n01;
      else ++n00;
    }
  double denom = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00);
  return 2.0 * (n11 * n00 - n10 * n01) / denom;
}

// Independent NMI reference in log base 2 (the base cancels in the ratio).
double base2_nmi(const Chromosome& p, const Chromosome& t) {
  std::size_t n = p.labels.size();
  std::map<int, double> cp, ct;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < n; ++i) {
    cp[p.labels[i]] += 1.0;
    ct[t.labels[i]] += 1.0;
    joint[{p.labels[i], t.labels[i]}] += 1.0;
  }
  double nd = static_cast<double>(n);
  double hp = 0.0, ht = 0.0, mi = 0.0;
  for (auto& [l, c] : cp) hp -= c / nd * std::log2(c / nd);
  for (auto& [l, c] : ct) ht -= c / nd * std::log2(c / nd);
  for (auto& [lp, c] : joint)
    mi += c / nd * std::log2(nd * c / (cp[lp.first] * ct[lp.second]));
  return mi / (0.5 * (hp + ht));
}

Chromosome random_partition(std::size_t n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> lab(0, k - 1);
  Chromosome c;
  for (std::size_t i = 0; i < n; ++i) c.labels.push_back(lab(rng));
  return c;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("identical non-trivial partitions score 1 across the board") {
  Chromosome c{{0, 0, 1, 1, 2, 2}};
  PartitionScore s = score_partition(c, c);
  CHECK(s.ari == doctest::Approx(1.0));
  CHECK(s.nmi == doctest::Approx(1.0));
  CHECK(s.purity == doctest::Approx(1.0));
  CHECK(s.n_clusters_pred == 3);
  CHECK(s.n_clusters_true == 3);
}

TEST_CASE("ari matches direct pair counting on random partitions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Chromosome p = random_partition(20, 4, rng);
    Chromosome t = random_partition(20, 3, rng);
    PartitionScore s = score_partition(p, t);
    CHECK(s.ari == doctest::Approx(pair_counting_ari(p, t)).epsilon(1e-9));
    // label ids are arbitrary: shifting them must not change the score
    Chromosome shifted = p;
    for (int& l : shifted.labels) l += 5;
    CHECK(score_partition(shifted, t).ari == doctest::Approx(s.ari));
  }
}

TEST_CASE("nmi matches an independent base-2 computation") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    Chromosome p = random_partition(20, 4, rng);
    Chromosome t = random_partition(20, 3, rng);
    PartitionScore s = score_partition(p, t);
    CHECK(s.nmi == doctest::Approx(base2_nmi(p, t)).epsilon(1e-9));
  }
}

TEST_CASE("scores are symmetric in their arguments") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Chromosome p = random_partition(15, 4, rng);
    Chromosome t = random_partition(15, 2, rng);
    PartitionScore ab = score_partition(p, t);
    PartitionScore ba = score_partition(t, p);
    CHECK(ab.ari == doctest::Approx(ba.ari));
    CHECK(ab.nmi == doctest::Approx(ba.nmi));
  }
}

TEST_CASE("trivial-partition conventions") {
  Chromosome ones{{0, 0, 0, 0}};
  Chromosome split{{0, 0, 1, 1}};
  Chromosome singles{{0, 1, 2, 3}};
  // identical trivial partitions are identical partitions
  CHECK(score_partition(ones, ones).ari == 1.0);
  CHECK(score_partition(ones, ones).nmi == 1.0);
  CHECK(score_partition(singles, singles).ari == 1.0);
  // an uninformative prediction earns no adjusted credit
  CHECK(score_partition(ones, split).ari == doctest::Approx(0.0));
  CHECK(score_partition(ones, split).nmi == doctest::Approx(0.0));
  CHECK(score_partition(singles, split).ari == doctest::Approx(0.0));
  // purity ignores chance: singletons are trivially pure
  CHECK(score_partition(singles, split).purity == doctest::Approx(1.0));
  CHECK(score_partition(ones, split).purity == doctest::Approx(0.5));
}

TEST_CASE("purity counts the majority overlap per predicted cluster") {
  Chromosome p{{0, 0, 1, 1}};
  Chromosome t{{0, 1, 1, 1}};
  CHECK(score_partition(p, t).purity == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("score_partition validates its inputs") {
  Chromosome two{{0, 1}};
  Chromosome one{{0}};
  CHECK_THROWS_AS(score_partition(two, one), DataMismatchError);
  Chromosome empty;
  CHECK_THROWS_AS(score_partition(empty, empty), InputError);
}

TEST_CASE("connected components label by first occurrence") {
  NodeTable nodes;
  for (int i = 0; i < 5; ++i) nodes.insert("L" + std::to_string(i));
  WeightedGraph g(nodes, 0.1);
  g.add_edge(0, 3, 0.9);
  g.add_edge(1, 2, 0.8);  // node 4 isolated
  Chromosome c = connected_components(g);
  CHECK(c.labels == std::vector<int>{0, 1, 1, 0, 2});
  CHECK(is_canonical(c));
}

TEST_CASE("partition csv round-trips through write and align") {
  NodeTable nodes;
  for (const char* n : {"ant", "bee", "cat", "dog"}) nodes.insert(n);
  Chromosome c{{0, 1, 1, 0}};
  std::ostringstream os;
  write_partition_csv(os, nodes, c);
  std::istringstream is(os.str());
  LabeledPartition p = read_partition_csv(is);
  CHECK(align_partition(p, nodes) == c);
}

TEST_CASE("align_partition reorders rows by the reference node table") {
  std::istringstream is("node,sector\ncat,7\nant,2\ndog,2\nbee,7\n");
  LabeledPartition p = read_partition_csv(is);
  NodeTable nodes;
  for (const char* n : {"ant", "bee", "cat", "dog"}) nodes.insert(n);
  CHECK(align_partition(p, nodes).labels == std::vector<int>{0, 1, 1, 0});
}

TEST_CASE("partition csv rejects malformed input with the line number") {
  auto rejects = [](const std::string& body, const std::string& needle) {
    std::istringstream is(body);
    try {
      read_partition_csv(is);
      return false;
    } catch (const InputError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
  };
  CHECK(rejects("node,sector\nant,1\nant,2\n", "line 3"));      // duplicate
  CHECK(rejects("node,sector\nant,1\nbee\n", "line 3"));        // field count
  CHECK(rejects("node,sector\nant,zero\n", "line 2"));          // bad sector
  CHECK(rejects("node,sector\n,3\n", "line 2"));                // empty name
  CHECK(rejects("node,sector\n", "no rows"));
}

TEST_CASE("align_partition flags node-set mismatches") {
  std::istringstream is("ant,0\nbee,1\n");
  LabeledPartition p = read_partition_csv(is);
  NodeTable bigger;
  for (const char* n : {"ant", "bee", "cat"}) bigger.insert(n);
  CHECK_THROWS_AS(align_partition(p, bigger), DataMismatchError);
  NodeTable renamed;
  for (const char* n : {"ant", "wasp"}) renamed.insert(n);
  CHECK_THROWS_AS(align_partition(p, renamed), DataMismatchError);
}

TEST_CASE("method names are stable identifiers") {
  CHECK(method_name(Method::kProposed) == "proposed");
  CHECK(method_name(Method::kPkwik) == "pkwik");
  CHECK(method_name(Method::kThresholdComponents) == "threshold-components");
}

TEST_CASE("compare_methods runs every method on every seed") {
  Scenario sc;
  sc.name = "lane";
  SegmentSpec seg;
  seg.points = {{0.0, 0.0}, {300.0, 0.0}};
  seg.inset_start = 15.0;
  seg.inset_end = 15.0;
  sc.network.segments.push_back(seg);
  sc.network.spacing = 30.0;
  sc.sim.n_vehicles = 12;
  sc.sim.duration = 400.0;
  sc.sim.advert_ttl = 6.0;

  GAConfig ga;
  ga.pop_size = 4;
  ga.generations = 2;

  std::vector<Method> methods{Method::kProposed, Method::kPkwik,
                              Method::kThresholdComponents};
  std::vector<std::uint64_t> seeds{1, 2};
  std::vector<ComparisonRow> rows = compare_methods(sc, methods, seeds, ga);
  REQUIRE(rows.size() == 6);
  for (const ComparisonRow& r : rows) {
    CHECK(r.scenario == "lane");
    CHECK(r.score.n_clusters_true == 1);  // a single road is one sector
    CHECK(r.score.purity > 0.0);
  }

  std::ostringstream os;
  write_comparison_csv(os, rows);
  std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  std::vector<MethodSummary> summary = summarize_comparison(rows);
  REQUIRE(summary.size() == 3);
  for (const MethodSummary& s : summary) CHECK(s.runs == 2);
  std::ostringstream table;
  print_comparison_table(table, summary);
  CHECK(table.str().find("pkwik") != std::string::npos);
}

}  // TEST_SUITE
