#include "sectorize/similarity.hpp"

namespace sectorize {

Eigen::MatrixXd transition_matrix(const WeightedGraph& g) {
  Eigen::MatrixXd w = g.weight_matrix();
  for (Index i = 0; i < w.rows(); ++i) {
    double sum = w.row(i).sum();
    if (sum > 0.0) w.row(i) /= sum;
  }
  return w;
}

}  // namespace sectorize
