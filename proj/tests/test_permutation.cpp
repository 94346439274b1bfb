#include "sectorize/permutation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <vector>

using namespace sectorize;

namespace {

// symmetric interval matrix over nodes 0..n-1 from explicit entries
TimeMatrix make_intervals(Index n,
                          const std::vector<std::tuple<Index, Index, double>>&
                              entries) {
  TimeMatrix t = TimeMatrix::zero(n);
  for (auto [i, j, v] : entries) {
    t.mean(i, j) = t.mean(j, i) = v;
    t.observations(i, j) = t.observations(j, i) = 1;
  }
  return t;
}

// Exhaustive reference: every permutation of the cluster, every distinct
// observed intra-cluster interval as the reference value.
double exhaustive_best(const std::vector<Index>& cluster, const TimeMatrix& t) {
  std::set<double> refs;
  for (std::size_t a = 0; a < cluster.size(); ++a)
    for (std::size_t b = a + 1; b < cluster.size(); ++b)
      if (t.has(cluster[a], cluster[b])) refs.insert(t.mean(cluster[a], cluster[b]));
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> perm = cluster;
  std::sort(perm.begin(), perm.end());
  do {
    for (double t_ref : refs)
      best = std::min(best, permutation_diss(perm, t, t_ref));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_SUITE("permutation") {

TEST_CASE("permutation_diss sums absolute deviations along the order") {
  TimeMatrix t = make_intervals(3, {{0, 1, 2.0}, {1, 2, 4.0}});
  std::vector<Index> order{0, 1, 2};
  CHECK(permutation_diss(order, t, 3.0) == doctest::Approx(2.0));
  CHECK(permutation_diss(order, t, 2.0) == doctest::Approx(0.0 + 2.0));
  std::vector<Index> rev{2, 1, 0};  // symmetric matrix: reversal costs the same
  CHECK(permutation_diss(rev, t, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("unobserved adjacencies cost the fixed penalty") {
  TimeMatrix t = make_intervals(3, {{0, 1, 2.0}});  // 1-2 never observed
  std::vector<Index> order{0, 1, 2};
  CHECK(permutation_diss(order, t, 2.0) ==
        doctest::Approx(kMissingIntervalPenalty));
}

TEST_CASE("orders shorter than two nodes cost nothing") {
  TimeMatrix t = make_intervals(2, {{0, 1, 5.0}});
  std::vector<Index> one{0};
  std::vector<Index> none;
  CHECK(permutation_diss(one, t, 3.0) == 0.0);
  CHECK(permutation_diss(none, t, 3.0) == 0.0);
}

TEST_CASE("best_permutation recovers a perfect chain exactly") {
  // chain 3-1-0-2 with a constant 5s interval between neighbors; every other
  // pair carries an unrelated value
  TimeMatrix t = make_intervals(4, {{3, 1, 5.0},
                                    {1, 0, 5.0},
                                    {0, 2, 5.0},
                                    {3, 0, 11.0},
                                    {1, 2, 13.0},
                                    {3, 2, 17.0}});
  std::vector<Index> cluster{0, 1, 2, 3};
  ClusterPermutation p = best_permutation(cluster, t);
  CHECK(p.scoreable);
  CHECK(p.diss == doctest::Approx(0.0));
  CHECK(p.t_ref == doctest::Approx(5.0));
  std::vector<Index> expect{3, 1, 0, 2};
  std::vector<Index> reversed{2, 0, 1, 3};
  CHECK((p.order == expect || p.order == reversed));
}

TEST_CASE("clusters with no observed interval are unscoreable") {
  TimeMatrix t = TimeMatrix::zero(3);
  std::vector<Index> cluster{0, 1, 2};
  ClusterPermutation p = best_permutation(cluster, t);
  CHECK_FALSE(p.scoreable);
  std::vector<Index> single{1};
  CHECK_FALSE(best_permutation(single, t).scoreable);
}

TEST_CASE("a pair with one observed interval scores zero deviation") {
  TimeMatrix t = make_intervals(2, {{0, 1, 7.5}});
  std::vector<Index> cluster{0, 1};
  ClusterPermutation p = best_permutation(cluster, t);
  CHECK(p.scoreable);
  CHECK(p.diss == doctest::Approx(0.0));
  CHECK(p.t_ref == doctest::Approx(7.5));
}

TEST_CASE("heuristic matches the exhaustive optimum on small clusters") {
  // 200 random clusters of 4..8 nodes; the heuristic must never beat the
  // exhaustive search, must match it most of the time, and must always find a
  // zero-deviation chain when one exists
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size_dist(4, 8);
  std::uniform_int_distribution<int> grid(1, 12);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  int exact = 0, zero_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Index n = size_dist(rng);
    std::vector<std::tuple<Index, Index, double>> entries;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (coin(rng) > 0.15)
          entries.emplace_back(i, j, static_cast<double>(grid(rng)));
    if (trial % 4 == 0) {
      // plant a perfect chain over a random node order
      std::vector<Index> chain(static_cast<std::size_t>(n));
      std::iota(chain.begin(), chain.end(), Index{0});
      std::shuffle(chain.begin(), chain.end(), rng);
      for (std::size_t k = 0; k + 1 < chain.size(); ++k)
        entries.emplace_back(chain[k], chain[k + 1], 6.0);
    }
    if (entries.empty()) entries.emplace_back(0, 1, 3.0);
    TimeMatrix t = TimeMatrix::zero(n);
    for (auto [i, j, v] : entries) {  // later entries overwrite earlier ones
      t.mean(i, j) = t.mean(j, i) = v;
      t.observations(i, j) = t.observations(j, i) = 1;
    }
    std::vector<Index> cluster(static_cast<std::size_t>(n));
    std::iota(cluster.begin(), cluster.end(), Index{0});
    ClusterPermutation p = best_permutation(cluster, t);
    REQUIRE(p.scoreable);
    double optimum = exhaustive_best(cluster, t);
    CHECK(p.diss >= optimum - 1e-9);
    if (std::abs(p.diss - optimum) < 1e-9) ++exact;
    if (optimum < 1e-9) {
      ++zero_cases;
      CHECK(p.diss < 1e-9);
    }
  }
  CHECK(zero_cases > 20);  // the planted chains must actually show up
  CHECK(exact >= 120);     // at least 60% solved to optimality
}

TEST_CASE("cache returns the same result object for a repeated cluster") {
  TimeMatrix t = make_intervals(4, {{0, 1, 2.0}, {1, 2, 2.0}, {2, 3, 2.0}});
  PermutationCache cache(t);
  std::vector<Index> cluster{0, 1, 2, 3};
  const ClusterPermutation& first = cache.get(cluster);
  const ClusterPermutation& again = cache.get(cluster);
  CHECK(&first == &again);
  CHECK(cache.size() == 1);
  CHECK(first.diss == doctest::Approx(0.0));
  std::vector<Index> sub{0, 1};
  cache.get(sub);
  CHECK(cache.size() == 2);
}

}  // TEST_SUITE
