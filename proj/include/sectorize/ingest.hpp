#pragma once

#include "sectorize/common.hpp"
#include "sectorize/graph.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sectorize {

// One pairing event reported by a streetlight: `receiver` observed a traffic
// element at `recv_time` and attributes its arrival to `sender`, which had
// advertised its own observation taken at `send_time`.
struct AssociationRecord {
  std::string receiver;
  double recv_time = 0.0;
  std::string sender;
  double send_time = 0.0;
};

using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Directed mean observation intervals. mean(i, j) is meaningful only where
// observations(i, j) > 0; entries with no observations stay at zero.
struct TimeMatrix {
  Eigen::MatrixXd mean;
  CountMatrix observations;

  bool has(Index i, Index j) const { return observations(i, j) > 0; }

  static TimeMatrix zero(Index n) {
    return TimeMatrix{Eigen::MatrixXd::Zero(n, n), CountMatrix::Zero(n, n)};
  }
};

// Records dropped during accumulation, by reason.
struct RejectionCounts {
  std::size_t unknown_node = 0;   // name not present in the node table
  std::size_t clock_anomaly = 0;  // recv_time < send_time
  std::size_t self_pair = 0;      // receiver == sender

  std::size_t total() const { return unknown_node + clock_anomaly + self_pair; }
};

// Streams association records into per-ordered-pair counts and interval
// samples. Accumulators over disjoint record batches can be merged; merge
// order does not affect counts or means.
class Accumulator {
 public:
  explicit Accumulator(NodeTable nodes);

  void add(const AssociationRecord& r);
  void add(std::span<const AssociationRecord> records);
  void merge(const Accumulator& other);

  const NodeTable& nodes() const { return nodes_; }
  const CountMatrix& counts() const { return counts_; }
  const RejectionCounts& rejections() const { return rejections_; }

  // Interval samples (recv_time - send_time) for receiver i / sender j, in
  // arrival order.
  const std::vector<double>& intervals(Index i, Index j) const;

  // Mean of the interval samples per directed pair.
  TimeMatrix mean_intervals() const;

 private:
  NodeTable nodes_;
  CountMatrix counts_;
  std::vector<std::vector<double>> intervals_;  // row-major n*n
  RejectionCounts rejections_;
};

// Row-max normalization: each row of the count matrix divided by its own
// maximum. All-zero rows stay zero; the diagonal is zeroed.
Eigen::MatrixXd normalize_rows(const CountMatrix& counts);

// Direction of an undirected value derived from two directed entries.
enum class Symmetrization {
  kMax,   // keep the larger directed probability
  kMean,  // average the directed probabilities
};

// Builds the undirected probabilistic graph from a directed probability
// matrix. An edge {u, v} exists when either directed entry is positive.
ProbabilisticGraph build_graph(const NodeTable& nodes,
                               const Eigen::MatrixXd& directed,
                               Symmetrization mode = Symmetrization::kMax);

// Undirected interval matrix: the mean of whichever directed entries are
// present (one or both).
TimeMatrix symmetrize(const TimeMatrix& t);

// records.csv: header "receiver,recv_time,sender,send_time". Malformed rows
// raise InputError with the line number.
std::vector<AssociationRecord> read_records_csv(std::istream& is);
void write_records_csv(std::ostream& os,
                       std::span<const AssociationRecord> records);

// Matrix CSVs carry node names in the header row and first column.
void write_matrix_csv(std::ostream& os, const NodeTable& nodes,
                      const Eigen::MatrixXd& m);
void write_matrix_csv(std::ostream& os, const NodeTable& nodes,
                      const CountMatrix& m);

}  // namespace sectorize
