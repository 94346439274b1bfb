#pragma once

#include "sectorize/common.hpp"
#include "sectorize/graph.hpp"

#include <cmath>

namespace sectorize {

// Row-stochastic transition matrix of a weighted graph: each row of the
// weight matrix divided by its sum. Rows of isolated nodes stay zero.
Eigen::MatrixXd transition_matrix(const WeightedGraph& g);

// Blends a self-transition into every non-isolated row: self_weight stays
// put, the rest moves per `omega`. Yields the lazy walk (I + omega) / 2 at
// the default. Street graphs are chains and even cycles, hence bipartite: a
// plain even-length walk can only co-arrive from nodes at even hop distance,
// which zeroes the similarity of adjacent lights. The self-transition breaks
// that parity while keeping rows stochastic. Isolated (all-zero) rows are
// preserved.
inline Eigen::MatrixXd with_self_transitions(const Eigen::MatrixXd& omega,
                                             double self_weight = 0.5) {
  if (self_weight < 0.0 || self_weight > 1.0)
    throw std::invalid_argument(
        "similarity: self weight must be within [0, 1]");
  Eigen::MatrixXd out = (1.0 - self_weight) * omega;
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    if (omega.row(i).sum() > 0.0) out(i, i) += self_weight;
  return out;
}

// Random-walk co-arrival similarity of even order t:
//   sim^0 = I,   sim^t = omega * sim^(t-2) * omega^T.
// Entry (i, j) is the probability that independent t/2-step walks from i and
// from j end on the same node. Odd or negative orders are rejected.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
random_walk_similarity(const Eigen::MatrixBase<Derived>& omega, int order) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic,
                            Eigen::Dynamic>;
  if (order < 0 || order % 2 != 0)
    throw std::invalid_argument(
        "similarity: walk order must be even and non-negative");
  if (omega.rows() != omega.cols())
    throw std::invalid_argument("similarity: transition matrix must be square");
  Mat sim = Mat::Identity(omega.rows(), omega.cols());
  for (int t = 2; t <= order; t += 2)
    sim = (omega * sim * omega.transpose()).eval();
  return sim;
}

// Similarity rescaled so each diagonal entry is 1 (its row maximum):
// sim_ij / sqrt(sim_ii * sim_jj), with zero-diagonal rows left at zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
cosine_normalized(const Eigen::MatrixBase<Derived>& sim) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat out = sim;
  Eigen::Index n = sim.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Scalar denom = std::sqrt(sim(i, i) * sim(j, j));
      out(i, j) = denom > Scalar(0) ? sim(i, j) / denom : Scalar(0);
    }
  }
  return out;
}

// Dissimilarity: d_ij = 1 - sim_ij / max(sim) off the diagonal, d_ii = 0.
// An all-zero similarity (edgeless graph) maps every distinct pair to 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
dissimilarity(const Eigen::MatrixBase<Derived>& sim) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::Index n = sim.rows();
  Scalar mx = n > 0 ? sim.maxCoeff() : Scalar(0);
  Mat d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j)
        d(i, j) = Scalar(0);
      else
        d(i, j) = mx > Scalar(0) ? Scalar(1) - sim(i, j) / mx : Scalar(1);
    }
  }
  return d;
}

}  // namespace sectorize
