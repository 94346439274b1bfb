#include "sectorize/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace sectorize {

Accumulator::Accumulator(NodeTable nodes) : nodes_(std::move(nodes)) {
  Index n = nodes_.size();
  counts_ = CountMatrix::Zero(n, n);
  intervals_.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
}

void Accumulator::add(const AssociationRecord& r) {
  auto ri = nodes_.find(r.receiver);
  auto si = nodes_.find(r.sender);
  if (!ri || !si) {
    ++rejections_.unknown_node;
    return;
  }
  if (*ri == *si) {
    ++rejections_.self_pair;
    return;
  }
  if (r.recv_time < r.send_time) {
    ++rejections_.clock_anomaly;
    return;
  }
  counts_(*ri, *si) += 1;
  intervals_[static_cast<std::size_t>(*ri * nodes_.size() + *si)].push_back(
      r.recv_time - r.send_time);
}

void Accumulator::add(std::span<const AssociationRecord> records) {
  for (const AssociationRecord& r : records) add(r);
}

void Accumulator::merge(const Accumulator& other) {
  if (!(nodes_ == other.nodes_))
    throw DataMismatchError("ingest: cannot merge accumulators over different node tables");
  counts_ += other.counts_;
  for (std::size_t k = 0; k < intervals_.size(); ++k)
    intervals_[k].insert(intervals_[k].end(), other.intervals_[k].begin(),
                         other.intervals_[k].end());
  rejections_.unknown_node += other.rejections_.unknown_node;
  rejections_.clock_anomaly += other.rejections_.clock_anomaly;
  rejections_.self_pair += other.rejections_.self_pair;
}

const std::vector<double>& Accumulator::intervals(Index i, Index j) const {
  return intervals_.at(static_cast<std::size_t>(i * nodes_.size() + j));
}

TimeMatrix Accumulator::mean_intervals() const {
  Index n = nodes_.size();
  TimeMatrix t = TimeMatrix::zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const std::vector<double>& samples = intervals(i, j);
      if (samples.empty()) continue;
      double sum = 0.0;
      for (double s : samples) sum += s;
      t.mean(i, j) = sum / static_cast<double>(samples.size());
      t.observations(i, j) = static_cast<std::int64_t>(samples.size());
    }
  }
  return t;
}

Eigen::MatrixXd normalize_rows(const CountMatrix& counts) {
  Index n = counts.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, counts.cols());
  for (Index i = 0; i < n; ++i) {
    std::int64_t rowmax = 0;
    for (Index j = 0; j < counts.cols(); ++j)
      if (i != j) rowmax = std::max(rowmax, counts(i, j));
    if (rowmax == 0) continue;
    for (Index j = 0; j < counts.cols(); ++j)
      if (i != j)
        p(i, j) =
            static_cast<double>(counts(i, j)) / static_cast<double>(rowmax);
  }
  return p;
}

ProbabilisticGraph build_graph(const NodeTable& nodes,
                               const Eigen::MatrixXd& directed,
                               Symmetrization mode) {
  Index n = nodes.size();
  if (directed.rows() != n || directed.cols() != n)
    throw std::invalid_argument("ingest: probability matrix size mismatch");
  ProbabilisticGraph g(nodes);
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      double a = directed(u, v);
      double b = directed(v, u);
      if (a <= 0.0 && b <= 0.0) continue;
      double p = 0.0;
      switch (mode) {
        case Symmetrization::kMax:
          p = std::max(a, b);
          break;
        case Symmetrization::kMean:
          // Mean over the two directed slots, absent direction counted as 0.
          p = (a + b) / 2.0;
          break;
      }
      g.add_edge(u, v, p);
    }
  }
  return g;
}

TimeMatrix symmetrize(const TimeMatrix& t) {
  Index n = t.mean.rows();
  TimeMatrix out = TimeMatrix::zero(n);
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      bool a = t.has(u, v);
      bool b = t.has(v, u);
      if (!a && !b) continue;
      double value;
      if (a && b)
        value = (t.mean(u, v) + t.mean(v, u)) / 2.0;
      else
        value = a ? t.mean(u, v) : t.mean(v, u);
      std::int64_t obs = t.observations(u, v) + t.observations(v, u);
      out.mean(u, v) = out.mean(v, u) = value;
      out.observations(u, v) = out.observations(v, u) = obs;
    }
  }
  return out;
}

std::vector<AssociationRecord> read_records_csv(std::istream& is) {
  std::vector<AssociationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (t == "receiver,recv_time,sender,send_time") continue;
      // Fall through: headerless files are accepted.
    }
    std::vector<std::string> f = split_csv_line(t);
    if (f.size() != 4)
      throw InputError("records.csv line " + std::to_string(lineno) +
                       ": expected 4 fields, got " + std::to_string(f.size()));
    AssociationRecord r;
    r.receiver = trim(f[0]);
    r.sender = trim(f[2]);
    try {
      std::size_t used = 0;
      r.recv_time = std::stod(f[1], &used);
      r.send_time = std::stod(f[3], &used);
    } catch (const std::exception&) {
      throw InputError("records.csv line " + std::to_string(lineno) +
                       ": unparseable timestamp");
    }
    if (r.receiver.empty() || r.sender.empty())
      throw InputError("records.csv line " + std::to_string(lineno) +
                       ": empty node name");
    out.push_back(std::move(r));
  }
  return out;
}

void write_records_csv(std::ostream& os,
                       std::span<const AssociationRecord> records) {
  os << "receiver,recv_time,sender,send_time\n";
  char buf[64];
  for (const AssociationRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%.6f,", r.recv_time);
    os << r.receiver << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.6f", r.send_time);
    os << r.sender << ',' << buf << '\n';
  }
}

namespace {

template <typename Mat, typename Fmt>
void write_matrix_csv_impl(std::ostream& os, const NodeTable& nodes,
                           const Mat& m, Fmt fmt) {
  Index n = nodes.size();
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("ingest: matrix size does not match node table");
  os << "node";
  for (Index j = 0; j < n; ++j) os << ',' << nodes.name(j);
  os << '\n';
  for (Index i = 0; i < n; ++i) {
    os << nodes.name(i);
    for (Index j = 0; j < n; ++j) os << ',' << fmt(m(i, j));
    os << '\n';
  }
}

}  // namespace

void write_matrix_csv(std::ostream& os, const NodeTable& nodes,
                      const Eigen::MatrixXd& m) {
  write_matrix_csv_impl(os, nodes, m, [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  });
}

void write_matrix_csv(std::ostream& os, const NodeTable& nodes,
                      const CountMatrix& m) {
  write_matrix_csv_impl(os, nodes, m,
                        [](std::int64_t x) { return std::to_string(x); });
}

}  // namespace sectorize
