#include "sectorize/evaluation.hpp"

#include "sectorize/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace sectorize {

namespace {

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

PartitionScore score_partition(const Chromosome& predicted,
                               const Chromosome& truth) {
  if (predicted.size() != truth.size())
    throw DataMismatchError(
        "evaluation: partition lengths differ: " +
        std::to_string(predicted.size()) + " vs " +
        std::to_string(truth.size()));
  Index n = predicted.size();
  if (n == 0) throw InputError("evaluation: cannot score empty partitions");

  Chromosome p = canonicalized(predicted);
  Chromosome t = canonicalized(truth);
  int kp = cluster_count(p);
  int kt = cluster_count(t);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kp, kt);
  for (Index i = 0; i < n; ++i)
    m(p.labels[static_cast<std::size_t>(i)],
      t.labels[static_cast<std::size_t>(i)]) += 1.0;
  Eigen::VectorXd a = m.rowwise().sum();
  Eigen::VectorXd b = m.colwise().sum();
  double nd = static_cast<double>(n);

  PartitionScore score;
  score.n_clusters_pred = kp;
  score.n_clusters_true = kt;

  // ARI via pair counting. Two trivial partitions of the same shape (both
  // one cluster, or both all singletons) are identical, hence 1.
  double sum_cells = 0.0;
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j) sum_cells += choose2(m(i, j));
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < kp; ++i) sum_a += choose2(a(i));
  for (int j = 0; j < kt; ++j) sum_b += choose2(b(j));
  if ((kp == 1 && kt == 1) || (kp == n && kt == n)) {
    score.ari = 1.0;
  } else {
    double expected = sum_a * sum_b / choose2(nd);
    double maximum = 0.5 * (sum_a + sum_b);
    score.ari = std::abs(maximum - expected) < 1e-12
                    ? 0.0
                    : (sum_cells - expected) / (maximum - expected);
  }

  // NMI with arithmetic-mean normalization. Both partitions uninformative
  // (single cluster) means they are identical; one uninformative side yields
  // zero mutual information, hence 0.
  double hu = 0.0, hv = 0.0, mi = 0.0;
  for (int i = 0; i < kp; ++i)
    if (a(i) > 0.0) hu -= a(i) / nd * std::log(a(i) / nd);
  for (int j = 0; j < kt; ++j)
    if (b(j) > 0.0) hv -= b(j) / nd * std::log(b(j) / nd);
  for (int i = 0; i < kp; ++i)
    for (int j = 0; j < kt; ++j)
      if (m(i, j) > 0.0)
        mi += m(i, j) / nd * std::log(nd * m(i, j) / (a(i) * b(j)));
  mi = std::max(mi, 0.0);
  if (hu < 1e-12 && hv < 1e-12) {
    score.nmi = 1.0;
  } else {
    double denom = 0.5 * (hu + hv);
    score.nmi = denom < 1e-12 ? 0.0 : std::min(mi / denom, 1.0);
  }

  double hits = 0.0;
  for (int i = 0; i < kp; ++i) hits += m.row(i).maxCoeff();
  score.purity = hits / nd;
  return score;
}

void write_partition_csv(std::ostream& os, const NodeTable& nodes,
                         const Chromosome& c) {
  if (nodes.size() != c.size())
    throw DataMismatchError(
        "evaluation: partition length does not match node table");
  os << "node,sector\n";
  for (Index i = 0; i < c.size(); ++i)
    os << nodes.name(i) << ',' << c.labels[static_cast<std::size_t>(i)]
       << '\n';
}

LabeledPartition read_partition_csv(std::istream& is) {
  LabeledPartition out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string cleaned = trim(line);
    if (cleaned.empty()) continue;
    if (line_no == 1 && cleaned == "node,sector") continue;
    std::vector<std::string> fields = split_csv_line(cleaned);
    if (fields.size() != 2)
      throw InputError("partition csv line " + std::to_string(line_no) +
                       ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    std::string name = trim(fields[0]);
    if (name.empty())
      throw InputError("partition csv line " + std::to_string(line_no) +
                       ": empty node name");
    if (out.nodes.find(name))
      throw InputError("partition csv line " + std::to_string(line_no) +
                       ": duplicate node " + name);
    int sector = 0;
    try {
      sector = std::stoi(trim(fields[1]));
    } catch (const std::exception&) {
      throw InputError("partition csv line " + std::to_string(line_no) +
                       ": bad sector id '" + fields[1] + "'");
    }
    out.nodes.insert(name);
    out.labels.labels.push_back(sector);
  }
  if (out.labels.labels.empty())
    throw InputError("partition csv: no rows");
  out.labels = canonicalized(out.labels);
  return out;
}

Chromosome align_partition(const LabeledPartition& p, const NodeTable& nodes) {
  if (p.nodes.size() != nodes.size())
    throw DataMismatchError("evaluation: node sets differ in size: " +
                            std::to_string(p.nodes.size()) + " vs " +
                            std::to_string(nodes.size()));
  Chromosome out;
  out.labels.reserve(static_cast<std::size_t>(nodes.size()));
  for (Index i = 0; i < nodes.size(); ++i) {
    std::optional<Index> j = p.nodes.find(nodes.name(i));
    if (!j)
      throw DataMismatchError("evaluation: node " + nodes.name(i) +
                              " missing from partition");
    out.labels.push_back(p.labels.labels[static_cast<std::size_t>(*j)]);
  }
  return canonicalized(out);
}

Chromosome connected_components(const WeightedGraph& g) {
  Index n = g.node_count();
  Chromosome c;
  c.labels.assign(static_cast<std::size_t>(n), -1);
  int next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (c.labels[static_cast<std::size_t>(s)] != -1) continue;
    int label = next++;
    c.labels[static_cast<std::size_t>(s)] = label;
    stack.assign(1, s);
    while (!stack.empty()) {
      Index u = stack.back();
      stack.pop_back();
      for (Index v : g.neighbors(u))
        if (c.labels[static_cast<std::size_t>(v)] == -1) {
          c.labels[static_cast<std::size_t>(v)] = label;
          stack.push_back(v);
        }
    }
  }
  return c;  // labels appear in first-occurrence order already
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kProposed: return "proposed";
    case Method::kPkwik: return "pkwik";
    case Method::kThresholdComponents: return "threshold-components";
  }
  return "unknown";
}

PipelineData run_scenario(const Scenario& scenario, std::uint64_t seed) {
  PipelineData d;
  d.network = build_network(scenario.network);
  SimConfig cfg = scenario.sim;
  cfg.rng_seed = seed;
  std::mt19937_64 traffic_rng(derive_seed(seed, 0, 0));
  std::vector<TrafficElement> traffic =
      generate_traffic(d.network, cfg, traffic_rng);
  d.sim = simulate(d.network, traffic, cfg);
  Accumulator acc(d.network.node_table());
  acc.add(d.sim.records);
  d.counts = acc.counts();
  d.rejections = acc.rejections();
  d.directed_p = normalize_rows(d.counts);
  d.intervals = acc.mean_intervals();
  d.graph = build_graph(acc.nodes(), d.directed_p);
  return d;
}

Chromosome run_method(Method m, const PipelineData& data, const GAConfig& ga,
                      std::uint64_t seed) {
  switch (m) {
    case Method::kProposed: {
      GAConfig cfg = ga;
      cfg.rng_seed = seed;
      return evolve(data.graph, data.intervals, cfg).best;
    }
    case Method::kPkwik: {
      // the baseline sees every edge, not a thresholded view
      WeightedGraph full(data.graph.nodes(), 0.0);
      for (const Edge& e : data.graph.edges()) full.add_edge(e.u, e.v, e.p);
      std::mt19937_64 rng(derive_seed(seed, 2, 0));
      return pkwik_cluster(full, rng);
    }
    case Method::kThresholdComponents:
      return connected_components(apply_threshold(data.graph, 0.5));
  }
  throw std::invalid_argument("evaluation: unknown method");
}

std::vector<ComparisonRow> compare_methods(const Scenario& scenario,
                                           std::span<const Method> methods,
                                           std::span<const std::uint64_t> seeds,
                                           const GAConfig& ga) {
  std::vector<ComparisonRow> rows;
  rows.reserve(methods.size() * seeds.size());
  for (std::uint64_t seed : seeds) {
    PipelineData data = run_scenario(scenario, seed);
    for (Method m : methods) {
      ComparisonRow row;
      row.scenario = scenario.name;
      row.method = m;
      row.seed = seed;
      row.score = score_partition(run_method(m, data, ga, seed),
                                  data.sim.truth);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_comparison_csv(std::ostream& os,
                          std::span<const ComparisonRow> rows) {
  os << "scenario,method,seed,ari,nmi,purity,n_clusters\n";
  char buf[96];
  for (const ComparisonRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d", r.score.ari,
                  r.score.nmi, r.score.purity, r.score.n_clusters_pred);
    os << r.scenario << ',' << method_name(r.method) << ',' << r.seed << ','
       << buf << '\n';
  }
}

std::vector<MethodSummary> summarize_comparison(
    std::span<const ComparisonRow> rows) {
  std::vector<MethodSummary> out;
  auto find = [&](const ComparisonRow& r) -> MethodSummary& {
    for (MethodSummary& s : out)
      if (s.scenario == r.scenario && s.method == r.method) return s;
    MethodSummary s;
    s.scenario = r.scenario;
    s.method = r.method;
    out.push_back(std::move(s));
    return out.back();
  };

  // Two passes: means, then sample standard deviations.
  for (const ComparisonRow& r : rows) {
    MethodSummary& s = find(r);
    ++s.runs;
    s.ari_mean += r.score.ari;
    s.nmi_mean += r.score.nmi;
    s.purity_mean += r.score.purity;
    s.clusters_mean += r.score.n_clusters_pred;
  }
  for (MethodSummary& s : out) {
    s.ari_mean /= s.runs;
    s.nmi_mean /= s.runs;
    s.purity_mean /= s.runs;
    s.clusters_mean /= s.runs;
  }
  for (const ComparisonRow& r : rows) {
    MethodSummary& s = find(r);
    s.ari_sd += (r.score.ari - s.ari_mean) * (r.score.ari - s.ari_mean);
    s.nmi_sd += (r.score.nmi - s.nmi_mean) * (r.score.nmi - s.nmi_mean);
    s.purity_sd +=
        (r.score.purity - s.purity_mean) * (r.score.purity - s.purity_mean);
  }
  for (MethodSummary& s : out) {
    double denom = s.runs > 1 ? s.runs - 1.0 : 1.0;
    s.ari_sd = std::sqrt(s.ari_sd / denom);
    s.nmi_sd = std::sqrt(s.nmi_sd / denom);
    s.purity_sd = std::sqrt(s.purity_sd / denom);
  }
  return out;
}

void print_comparison_table(std::ostream& os,
                            std::span<const MethodSummary> rows) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-16s %-22s %4s  %-15s %-15s %-15s %8s",
                "scenario", "method", "runs", "ari", "nmi", "purity",
                "clusters");
  os << buf << '\n';
  for (const MethodSummary& s : rows) {
    char ari[24], nmi[24], purity[24];
    std::snprintf(ari, sizeof ari, "%.3f +/- %.3f", s.ari_mean, s.ari_sd);
    std::snprintf(nmi, sizeof nmi, "%.3f +/- %.3f", s.nmi_mean, s.nmi_sd);
    std::snprintf(purity, sizeof purity, "%.3f +/- %.3f", s.purity_mean,
                  s.purity_sd);
    std::snprintf(buf, sizeof buf, "%-16s %-22s %4d  %-15s %-15s %-15s %8.1f",
                  s.scenario.c_str(),
                  std::string(method_name(s.method)).c_str(), s.runs, ari,
                  nmi, purity, s.clusters_mean);
    os << buf << '\n';
  }
}

}  // namespace sectorize
