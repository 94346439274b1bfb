#include "sectorize/ingest.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace sectorize;

namespace {

NodeTable abc() {
  NodeTable t;
  t.insert("a");
  t.insert("b");
  t.insert("c");
  return t;
}

AssociationRecord rec(const char* recv, double rt, const char* send,
                      double st) {
  return AssociationRecord{recv, rt, send, st};
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("accumulator counts directed pairs and means intervals") {
  Accumulator acc(abc());
  acc.add(rec("a", 10.0, "b", 8.0));   // interval 2
  acc.add(rec("a", 20.0, "b", 16.0));  // interval 4
  acc.add(rec("b", 5.0, "c", 4.0));    // interval 1
  CHECK(acc.counts()(0, 1) == 2);
  CHECK(acc.counts()(1, 0) == 0);  // direction matters
  CHECK(acc.counts()(1, 2) == 1);
  TimeMatrix t = acc.mean_intervals();
  CHECK(t.mean(0, 1) == doctest::Approx(3.0));  // (2 + 4) / 2
  CHECK(t.observations(0, 1) == 2);
  CHECK(t.has(1, 2));
  CHECK(!t.has(2, 1));
  CHECK(acc.intervals(0, 1) == std::vector<double>{2.0, 4.0});
}

TEST_CASE("accumulator rejects bad records by reason") {
  Accumulator acc(abc());
  acc.add(rec("a", 1.0, "zz", 0.5));  // unknown sender
  acc.add(rec("zz", 1.0, "a", 0.5));  // unknown receiver
  acc.add(rec("a", 1.0, "b", 2.0));   // received before sent
  acc.add(rec("a", 1.0, "a", 0.5));   // self pair
  CHECK(acc.rejections().unknown_node == 2);
  CHECK(acc.rejections().clock_anomaly == 1);
  CHECK(acc.rejections().self_pair == 1);
  CHECK(acc.rejections().total() == 4);
  CHECK(acc.counts().sum() == 0);
}

TEST_CASE("merge equals single-pass accumulation in any order") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> node(0, 2);
  std::uniform_real_distribution<double> when(0.0, 100.0);
  std::vector<AssociationRecord> all;
  NodeTable nodes = abc();
  for (int i = 0; i < 200; ++i) {
    double st = when(rng);
    all.push_back(rec(nodes.name(node(rng)).c_str(), st + when(rng) / 10.0,
                      nodes.name(node(rng)).c_str(), st));
  }
  Accumulator whole(nodes);
  whole.add(all);

  Accumulator s1(nodes), s2(nodes), s3(nodes);
  s1.add(std::span<const AssociationRecord>(all.data(), 50));
  s2.add(std::span<const AssociationRecord>(all.data() + 50, 100));
  s3.add(std::span<const AssociationRecord>(all.data() + 150, 50));
  // merge in a scrambled order
  Accumulator merged(nodes);
  merged.merge(s2);
  merged.merge(s3);
  merged.merge(s1);

  CHECK(merged.counts() == whole.counts());
  CHECK(merged.rejections().total() == whole.rejections().total());
  TimeMatrix a = merged.mean_intervals();
  TimeMatrix b = whole.mean_intervals();
  CHECK(a.observations == b.observations);
  CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("normalize_rows divides by the row maximum") {
  CountMatrix c = CountMatrix::Zero(3, 3);
  c(0, 1) = 4;
  c(0, 2) = 2;
  c(1, 0) = 5;
  Eigen::MatrixXd p = normalize_rows(c);
  CHECK(p(0, 1) == doctest::Approx(1.0));
  CHECK(p(0, 2) == doctest::Approx(0.5));
  CHECK(p(1, 0) == doctest::Approx(1.0));
  CHECK(p.row(2).sum() == 0.0);  // all-zero row stays zero
  for (Index i = 0; i < 3; ++i) CHECK(p(i, i) == 0.0);
}

TEST_CASE("normalize_rows zeroes the diagonal before scaling") {
  CountMatrix c = CountMatrix::Zero(2, 2);
  c(0, 0) = 100;  // self counts must not become the row max
  c(0, 1) = 5;
  Eigen::MatrixXd p = normalize_rows(c);
  CHECK(p(0, 1) == doctest::Approx(1.0));
  CHECK(p(0, 0) == 0.0);
}

TEST_CASE("build_graph takes the larger directed probability by default") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 1) = 0.8;
  d(1, 0) = 0.4;
  d(1, 2) = 0.6;  // one-sided entry still makes an edge
  ProbabilisticGraph g = build_graph(abc(), d);
  CHECK(g.probability(0, 1) == doctest::Approx(0.8));
  CHECK(g.probability(1, 2) == doctest::Approx(0.6));
  CHECK(g.edges().size() == 2);

  ProbabilisticGraph mean = build_graph(abc(), d, Symmetrization::kMean);
  CHECK(mean.probability(0, 1) == doctest::Approx(0.6));  // (0.8 + 0.4) / 2
}

TEST_CASE("symmetrize averages present directed entries only") {
  TimeMatrix t = TimeMatrix::zero(3);
  t.mean(0, 1) = 2.0;
  t.observations(0, 1) = 4;
  t.mean(1, 0) = 4.0;
  t.observations(1, 0) = 2;
  t.mean(1, 2) = 7.0;
  t.observations(1, 2) = 1;
  TimeMatrix s = symmetrize(t);
  CHECK(s.mean(0, 1) == doctest::Approx(3.0));  // mean of the two directions
  CHECK(s.mean(1, 0) == doctest::Approx(3.0));
  CHECK(s.mean(1, 2) == doctest::Approx(7.0));  // single direction carried over
  CHECK(s.mean(2, 1) == doctest::Approx(7.0));
  CHECK(s.has(2, 1));
  CHECK(!s.has(0, 2));
}

TEST_CASE("records csv round-trips") {
  std::vector<AssociationRecord> recs{rec("a", 1.5, "b", 1.0),
                                      rec("c", 9.25, "a", 8.5)};
  std::stringstream ss;
  write_records_csv(ss, recs);
  std::vector<AssociationRecord> back = read_records_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].receiver == "a");
  CHECK(back[0].recv_time == doctest::Approx(1.5));
  CHECK(back[1].sender == "a");
  CHECK(back[1].send_time == doctest::Approx(8.5));
}

TEST_CASE("records csv reports the offending line") {
  std::stringstream ss("receiver,recv_time,sender,send_time\na,1.0,b\n");
  try {
    read_records_csv(ss);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("matrix csv carries node names") {
  NodeTable nodes = abc();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = 0.5;
  std::stringstream ss;
  write_matrix_csv(ss, nodes, m);
  std::string text = ss.str();
  CHECK(text.find(",a,b,c") != std::string::npos);
  CHECK(text.find("a,") != std::string::npos);
}

}  // TEST_SUITE
