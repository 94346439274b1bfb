#include "sectorize/evaluation.hpp"
#include "sectorize/ga.hpp"
#include "sectorize/graph.hpp"
#include "sectorize/ingest.hpp"
#include "sectorize/similarity.hpp"
#include "sectorize/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sectorize;

namespace {

// ---- shared option plumbing -------------------------------------------------

struct SimOverrides {
  std::optional<int> vehicles;
  std::optional<int> pedestrians;
  std::optional<double> duration;
  std::optional<double> loss;
  std::optional<double> detection_radius;
  std::optional<double> radio_radius;
};

void add_sim_overrides(CLI::App* cmd, SimOverrides& o) {
  cmd->add_option("--vehicles", o.vehicles, "Override scenario vehicle count");
  cmd->add_option("--pedestrians", o.pedestrians,
                  "Override scenario pedestrian count");
  cmd->add_option("--duration", o.duration,
                  "Override simulated duration (seconds)");
  cmd->add_option("--loss", o.loss,
                  "Override message loss probability [0, 1]");
  cmd->add_option("--detection-radius", o.detection_radius,
                  "Override detection radius (m)");
  cmd->add_option("--radio-radius", o.radio_radius,
                  "Override radio radius (m)");
}

void apply_overrides(const SimOverrides& o, SimConfig& c) {
  if (o.vehicles) c.n_vehicles = *o.vehicles;
  if (o.pedestrians) c.n_pedestrians = *o.pedestrians;
  if (o.duration) c.duration = *o.duration;
  if (o.loss) c.message_loss_prob = *o.loss;
  if (o.detection_radius) c.detection_radius = *o.detection_radius;
  if (o.radio_radius) c.radio_radius = *o.radio_radius;
}

void add_ga_options(CLI::App* cmd, GAConfig& cfg) {
  cmd->add_option("--pop", cfg.pop_size, "Population size (even, >= 4)")
      ->capture_default_str();
  cmd->add_option("--generations", cfg.generations, "Generations per population")
      ->capture_default_str();
  cmd->add_option("--mutation", cfg.mutation_prob,
                  "Mutation probability in percent")
      ->capture_default_str();
  cmd->add_option("--local-search-frac", cfg.local_search_fraction,
                  "Fraction of members refined by local search each generation")
      ->capture_default_str();
  cmd->add_option("--walk-order", cfg.walk_order,
                  "Random-walk similarity order (even)")
      ->capture_default_str();
  cmd->add_option("--early-stop", cfg.early_stop_patience,
                  "Stop a population after this many stagnant generations "
                  "(0 = run all)")
      ->capture_default_str();
  cmd->add_option("--w1", cfg.weights.w1,
                  "Weight of the separation objective; consistency gets 1-w1")
      ->capture_default_str();
  cmd->add_option("--dist-weight", cfg.weights.dist_weight,
                  "Inter-cluster weight inside the separation objective")
      ->capture_default_str();
  static const std::map<std::string, InterMode> inter_modes{
      {"mean", InterMode::kMeanAll}, {"min", InterMode::kMinPair}};
  cmd->add_option("--inter-mode", cfg.weights.inter_mode,
                  "Separation term: mean dissimilarity to non-members, or "
                  "the minimum member/non-member gap")
      ->transform(CLI::CheckedTransformer(inter_modes, CLI::ignore_case));
  static const std::map<std::string, bool> sce_denoms{{"members", true},
                                                      {"intervals", false}};
  cmd->add_option("--sce-denominator", cfg.sce_policy.member_count_denominator,
                  "Denominator of the consistency statistics: cluster member "
                  "count (favors long regular chains) or interval count")
      ->transform(CLI::CheckedTransformer(sce_denoms, CLI::ignore_case));
  cmd->add_option("--sce-neutral", cfg.sce_policy.neutral_sc,
                  "Consistency score for clusters with no usable intervals")
      ->capture_default_str();
}

fs::path resolve_out(const std::string& given, const std::string& command,
                     const std::string& name, std::uint64_t seed) {
  if (!given.empty()) return given;
  const char* root = std::getenv("SECTORIZE_OUT");
  fs::path base = root && *root ? fs::path(root) : fs::path("runs");
  return base / (command + "-" + name + "-s" + std::to_string(seed));
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw InputError("cannot write " + p.string());
  return os;
}

std::vector<AssociationRecord> load_records(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw InputError("cannot open " + p.string());
  return read_records_csv(is);
}

LabeledPartition load_partition(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw InputError("cannot open " + p.string());
  try {
    return read_partition_csv(is);
  } catch (const InputError& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

NodeTable nodes_from_records(std::span<const AssociationRecord> records) {
  NodeTable t;
  for (const AssociationRecord& r : records) {
    t.insert(r.receiver);
    t.insert(r.sender);
  }
  return t;
}

json sim_json(const SimConfig& c) {
  return json{{"detection_radius", c.detection_radius},
              {"radio_radius", c.radio_radius},
              {"message_loss_prob", c.message_loss_prob},
              {"vehicles", c.n_vehicles},
              {"pedestrians", c.n_pedestrians},
              {"duration", c.duration},
              {"report_period", c.report_period},
              {"advert_ttl", c.advert_ttl},
              {"vehicle_speed", {c.vehicle_speed_min, c.vehicle_speed_max}},
              {"pedestrian_speed", c.pedestrian_speed},
              {"max_route_segments", c.max_route_segments},
              {"seed", c.rng_seed}};
}

json ga_json(const GAConfig& c) {
  return json{{"pop", c.pop_size},
              {"generations", c.generations},
              {"mutation", c.mutation_prob},
              {"local_search_frac", c.local_search_fraction},
              {"walk_order", c.walk_order},
              {"early_stop", c.early_stop_patience},
              {"seed", c.rng_seed},
              {"w1", c.weights.w1},
              {"dist_weight", c.weights.dist_weight},
              {"inter_mode",
               c.weights.inter_mode == InterMode::kMinPair ? "min" : "mean"},
              {"sce_denominator",
               c.sce_policy.member_count_denominator ? "members" : "intervals"},
              {"sce_neutral", c.sce_policy.neutral_sc}};
}

void write_meta(const fs::path& dir, const json& j) {
  open_out(dir / "meta.json") << j.dump(2) << '\n';
}

// Human-readable listing of what each side is missing; empty when the node
// sets agree.
std::string node_set_diff(const NodeTable& pred, const NodeTable& truth) {
  auto missing = [](const NodeTable& from, const NodeTable& in) {
    std::vector<std::string> names;
    for (Index i = 0; i < from.size() && names.size() < 5; ++i)
      if (!in.find(from.name(i))) names.push_back(from.name(i));
    return names;
  };
  std::vector<std::string> only_pred = missing(pred, truth);
  std::vector<std::string> only_truth = missing(truth, pred);
  if (only_pred.empty() && only_truth.empty() &&
      pred.size() == truth.size())
    return {};
  std::ostringstream ss;
  ss << "node sets differ (" << pred.size() << " predicted vs "
     << truth.size() << " reference)";
  auto list = [&](const char* tag, const std::vector<std::string>& names) {
    if (names.empty()) return;
    ss << "; " << tag << ":";
    for (const std::string& n : names) ss << ' ' << n;
    ss << " ...";
  };
  list("only in prediction", only_pred);
  list("only in reference", only_truth);
  return ss.str();
}

void print_score(std::ostream& os, const PartitionScore& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "ari=%.4f nmi=%.4f purity=%.4f clusters=%d (reference %d)",
                s.ari, s.nmi, s.purity, s.n_clusters_pred, s.n_clusters_true);
  os << buf << '\n';
}

void write_eval_csv(const fs::path& p, const PartitionScore& s) {
  std::ofstream os = open_out(p);
  os << "ari,nmi,purity,n_clusters_pred,n_clusters_true\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d,%d", s.ari, s.nmi,
                s.purity, s.n_clusters_pred, s.n_clusters_true);
  os << buf << '\n';
}

// Ingest artifacts shared by the ingest and pipeline commands.
void write_ingest_outputs(const fs::path& dir, const NodeTable& nodes,
                          const CountMatrix& counts,
                          const Eigen::MatrixXd& directed_p,
                          const TimeMatrix& intervals,
                          const ProbabilisticGraph& graph) {
  { std::ofstream os = open_out(dir / "counts.csv");
    write_matrix_csv(os, nodes, counts); }
  { std::ofstream os = open_out(dir / "probabilities.csv");
    write_matrix_csv(os, nodes, directed_p); }
  { std::ofstream os = open_out(dir / "intervals.csv");
    write_matrix_csv(os, nodes, intervals.mean); }
  { std::ofstream os = open_out(dir / "interval_counts.csv");
    write_matrix_csv(os, nodes, intervals.observations); }
  { std::ofstream os = open_out(dir / "graph.txt");
    save_edge_list(graph, os); }
  { std::ofstream os = open_out(dir / "graph.dot");
    save_dot(graph, os); }
}

void write_cluster_outputs(const fs::path& dir, const NodeTable& nodes,
                           const EvolveResult& res, const GAConfig& cfg,
                           json& meta) {
  { std::ofstream os = open_out(dir / "prediction.csv");
    write_partition_csv(os, nodes, res.best); }
  { std::ofstream os = open_out(dir / "trace.csv");
    write_trace_csv(os, res.trace); }
  json pops = json::array();
  for (const PopulationResult& p : res.populations)
    pops.push_back(json{{"threshold", p.threshold},
                        {"best_fitness", p.best_fitness},
                        {"generations_run", p.generations_run},
                        {"n_clusters", p.best_values.n_clusters}});
  meta["ga"] = ga_json(cfg);
  meta["best"] = json{{"population", res.best_population},
                      {"sce", res.best_values.sce},
                      {"dist", res.best_values.dist},
                      {"n_clusters", res.best_values.n_clusters}};
  meta["degenerate_graph"] = res.degenerate_graph;
  meta["populations"] = pops;
}

void dump_similarity_matrices(const fs::path& dir, const NodeTable& nodes,
                              const ProbabilisticGraph& graph,
                              int walk_order) {
  for (const WeightedGraph& wg : threshold_family(graph)) {
    // same composition the clustering uses
    Eigen::MatrixXd sim = cosine_normalized(random_walk_similarity(
        with_self_transitions(transition_matrix(wg)), walk_order));
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "l%03d",
                  static_cast<int>(std::llround(wg.threshold() * 100)));
    { std::ofstream os =
          open_out(dir / (std::string("similarity_") + suffix + ".csv"));
      write_matrix_csv(os, nodes, sim); }
    { std::ofstream os =
          open_out(dir / (std::string("dissimilarity_") + suffix + ".csv"));
      write_matrix_csv(os, nodes, dissimilarity(sim)); }
  }
}

// ---- subcommands ------------------------------------------------------------

int cmd_simulate(const std::string& scenario_path, const SimOverrides& ov,
                 std::optional<std::uint64_t> seed, const std::string& out) {
  Scenario sc = load_scenario(scenario_path);
  apply_overrides(ov, sc.sim);
  if (seed) sc.sim.rng_seed = *seed;
  sc.sim.validate();

  fs::path dir = resolve_out(out, "simulate", sc.name, sc.sim.rng_seed);
  fs::create_directories(dir);

  RoadNetwork network = build_network(sc.network);
  std::mt19937_64 traffic_rng(derive_seed(sc.sim.rng_seed, 0, 0));
  std::vector<TrafficElement> traffic =
      generate_traffic(network, sc.sim, traffic_rng);
  SimOutput sim = simulate(network, traffic, sc.sim);

  { std::ofstream os = open_out(dir / "records.csv");
    write_records_csv(os, sim.records); }
  { std::ofstream os = open_out(dir / "truth.csv");
    write_partition_csv(os, network.node_table(), sim.truth); }
  write_meta(dir, json{{"command", "simulate"},
                       {"scenario_file", scenario_path},
                       {"scenario", sc.name},
                       {"sim", sim_json(sc.sim)},
                       {"lights", network.lights.size()},
                       {"segments", sc.network.segments.size()},
                       {"stats",
                        {{"detections", sim.stats.detections},
                         {"records", sim.stats.records},
                         {"dropped_messages", sim.stats.dropped_messages},
                         {"expired_cache_hits",
                          sim.stats.expired_cache_hits}}}});

  std::cout << "simulated '" << sc.name << "': " << network.lights.size()
            << " lights, " << sim.records.size() << " records -> "
            << dir.string() << '\n';
  return 0;
}

int cmd_ingest(const std::string& records_path, const std::string& out) {
  std::vector<AssociationRecord> records = load_records(records_path);
  if (records.empty()) throw InputError("ingest: no records in input");
  NodeTable nodes = nodes_from_records(records);
  Accumulator acc(nodes);
  acc.add(records);
  Eigen::MatrixXd directed_p = normalize_rows(acc.counts());
  TimeMatrix intervals = acc.mean_intervals();
  ProbabilisticGraph graph = build_graph(nodes, directed_p);

  fs::path dir = resolve_out(out, "ingest", "records", 0);
  fs::create_directories(dir);
  write_ingest_outputs(dir, nodes, acc.counts(), directed_p, intervals,
                       graph);
  write_meta(dir, json{{"command", "ingest"},
                       {"records_file", records_path},
                       {"records", records.size()},
                       {"nodes", nodes.size()},
                       {"edges", graph.edges().size()},
                       {"rejected",
                        {{"unknown_node", acc.rejections().unknown_node},
                         {"clock_anomaly", acc.rejections().clock_anomaly},
                         {"self_pair", acc.rejections().self_pair}}}});

  std::cout << "ingested " << records.size() << " records: " << nodes.size()
            << " nodes, " << graph.edges().size() << " edges -> "
            << dir.string() << '\n';
  return 0;
}

int cmd_cluster(const std::string& records_path, const std::string& truth_path,
                GAConfig cfg, const std::string& out, bool dump_similarity) {
  cfg.validate();
  std::vector<AssociationRecord> records = load_records(records_path);
  if (records.empty()) throw InputError("cluster: no records in input");
  NodeTable nodes = nodes_from_records(records);
  Accumulator acc(nodes);
  acc.add(records);
  ProbabilisticGraph graph = build_graph(nodes, normalize_rows(acc.counts()));
  TimeMatrix intervals = acc.mean_intervals();

  EvolveResult res = evolve(graph, intervals, cfg);

  fs::path dir = resolve_out(out, "cluster", "records", cfg.rng_seed);
  fs::create_directories(dir);
  json meta{{"command", "cluster"}, {"records_file", records_path}};
  write_cluster_outputs(dir, nodes, res, cfg, meta);
  if (dump_similarity)
    dump_similarity_matrices(dir, nodes, graph, cfg.walk_order);

  if (res.degenerate_graph)
    std::cout << "warning: all thresholded graphs are edgeless; emitted the "
                 "all-singleton partition\n";
  std::cout << "clustered " << nodes.size() << " nodes into "
            << res.best_values.n_clusters << " sectors (population "
            << res.best_population << ") -> " << dir.string() << '\n';

  if (!truth_path.empty()) {
    LabeledPartition truth = load_partition(truth_path);
    std::string diff = node_set_diff(nodes, truth.nodes);
    if (!diff.empty()) throw DataMismatchError("cluster: " + diff);
    Chromosome truth_aligned =
        align_partition(truth, nodes);
    PartitionScore score = score_partition(res.best, truth_aligned);
    print_score(std::cout, score);
    write_eval_csv(dir / "eval.csv", score);
    meta["score"] = json{{"ari", score.ari},
                         {"nmi", score.nmi},
                         {"purity", score.purity}};
  }
  write_meta(dir, meta);
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& out) {
  LabeledPartition pred = load_partition(pred_path);
  LabeledPartition truth = load_partition(truth_path);
  std::string diff = node_set_diff(pred.nodes, truth.nodes);
  if (!diff.empty()) throw DataMismatchError("evaluate: " + diff);
  Chromosome pred_aligned = align_partition(pred, truth.nodes);
  PartitionScore score = score_partition(pred_aligned, truth.labels);
  print_score(std::cout, score);
  if (!out.empty()) {
    fs::create_directories(out);
    write_eval_csv(fs::path(out) / "eval.csv", score);
  }
  return 0;
}

int cmd_pipeline(const std::string& scenario_path, const SimOverrides& ov,
                 std::optional<std::uint64_t> seed, GAConfig cfg,
                 const std::string& out, bool dump_similarity) {
  cfg.validate();
  Scenario sc = load_scenario(scenario_path);
  apply_overrides(ov, sc.sim);
  std::uint64_t run_seed = seed ? *seed : sc.sim.rng_seed;
  sc.sim.validate();
  cfg.rng_seed = run_seed;

  fs::path dir = resolve_out(out, "pipeline", sc.name, run_seed);
  fs::create_directories(dir);

  PipelineData d = run_scenario(sc, run_seed);
  { std::ofstream os = open_out(dir / "records.csv");
    write_records_csv(os, d.sim.records); }
  { std::ofstream os = open_out(dir / "truth.csv");
    write_partition_csv(os, d.network.node_table(), d.sim.truth); }
  NodeTable nodes = d.network.node_table();
  write_ingest_outputs(dir, nodes, d.counts, d.directed_p, d.intervals,
                       d.graph);

  EvolveResult res = evolve(d.graph, d.intervals, cfg);
  json meta{{"command", "pipeline"},
            {"scenario_file", scenario_path},
            {"scenario", sc.name},
            {"seed", run_seed},
            {"sim", sim_json(sc.sim)},
            {"records", d.sim.records.size()}};
  write_cluster_outputs(dir, nodes, res, cfg, meta);
  if (dump_similarity)
    dump_similarity_matrices(dir, nodes, d.graph, cfg.walk_order);

  PartitionScore score = score_partition(res.best, d.sim.truth);
  write_eval_csv(dir / "eval.csv", score);
  meta["score"] = json{{"ari", score.ari},
                       {"nmi", score.nmi},
                       {"purity", score.purity}};
  write_meta(dir, meta);

  std::cout << "pipeline '" << sc.name << "' seed " << run_seed << ": "
            << d.sim.records.size() << " records, "
            << res.best_values.n_clusters << " sectors -> " << dir.string()
            << '\n';
  print_score(std::cout, score);
  return 0;
}

int cmd_bench(const std::string& scenario_path, const SimOverrides& ov,
              std::optional<std::uint64_t> seed, int n_seeds,
              std::vector<Method> methods, GAConfig cfg,
              const std::string& out) {
  cfg.validate();
  if (n_seeds < 1) throw InputError("bench: --seeds must be >= 1");
  Scenario sc = load_scenario(scenario_path);
  apply_overrides(ov, sc.sim);
  sc.sim.validate();
  std::uint64_t base = seed ? *seed : sc.sim.rng_seed;

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_seeds));
  for (int i = 0; i < n_seeds; ++i)
    seeds[static_cast<std::size_t>(i)] = base + static_cast<std::uint64_t>(i);

  std::vector<ComparisonRow> rows =
      compare_methods(sc, methods, seeds, cfg);

  fs::path dir = resolve_out(out, "bench", sc.name, base);
  fs::create_directories(dir);
  { std::ofstream os = open_out(dir / "comparison.csv");
    write_comparison_csv(os, rows); }
  json meta{{"command", "bench"},
            {"scenario_file", scenario_path},
            {"scenario", sc.name},
            {"seed_base", base},
            {"seeds", n_seeds},
            {"sim", sim_json(sc.sim)},
            {"ga", ga_json(cfg)}};
  json names = json::array();
  for (Method m : methods) names.push_back(std::string(method_name(m)));
  meta["methods"] = names;
  write_meta(dir, meta);

  std::vector<MethodSummary> table = summarize_comparison(rows);
  print_comparison_table(std::cout, table);
  std::cout << "-> " << (dir / "comparison.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sectorize: recover streetlight road sectors from IoT association "
      "records (simulate -> ingest -> cluster -> evaluate)"};
  app.require_subcommand(1);

  // simulate
  std::string sim_scenario, sim_out;
  SimOverrides sim_ov;
  std::optional<std::uint64_t> sim_seed;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Run a scenario and write records.csv + truth.csv");
  simulate_cmd->add_option("--scenario", sim_scenario, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--seed", sim_seed, "Override the scenario seed");
  simulate_cmd->add_option("--out", sim_out,
                           "Output directory (default: $SECTORIZE_OUT or "
                           "./runs, auto-named)");
  add_sim_overrides(simulate_cmd, sim_ov);

  // ingest
  std::string ing_records, ing_out;
  CLI::App* ingest_cmd = app.add_subcommand(
      "ingest", "Turn records into count/probability/interval matrices and "
                "the probabilistic graph");
  ingest_cmd->add_option("--records", ing_records, "records.csv")
      ->required()
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ing_out, "Output directory");

  // cluster
  std::string clu_records, clu_truth, clu_out;
  GAConfig clu_cfg;
  bool clu_dump = false;
  CLI::App* cluster_cmd = app.add_subcommand(
      "cluster", "Recover sectors from records with the multi-population GA");
  cluster_cmd->add_option("--records", clu_records, "records.csv")
      ->required()
      ->check(CLI::ExistingFile);
  cluster_cmd->add_option("--truth", clu_truth,
                          "Optional truth.csv to score against")
      ->check(CLI::ExistingFile);
  cluster_cmd->add_option("--seed", clu_cfg.rng_seed, "RNG seed")
      ->capture_default_str();
  cluster_cmd->add_option("--out", clu_out, "Output directory");
  cluster_cmd->add_flag("--dump-similarity", clu_dump,
                        "Also write per-threshold similarity/dissimilarity "
                        "matrices");
  add_ga_options(cluster_cmd, clu_cfg);

  // evaluate
  std::string eva_pred, eva_truth, eva_out;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "Score a predicted partition against a reference one");
  evaluate_cmd->add_option("--pred", eva_pred, "Predicted node,sector CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--truth", eva_truth, "Reference node,sector CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", eva_out,
                           "Optional directory for eval.csv");

  // pipeline
  std::string pip_scenario, pip_out;
  SimOverrides pip_ov;
  std::optional<std::uint64_t> pip_seed;
  GAConfig pip_cfg;
  bool pip_dump = false;
  CLI::App* pipeline_cmd = app.add_subcommand(
      "pipeline", "simulate + ingest + cluster + evaluate in one run");
  pipeline_cmd->add_option("--scenario", pip_scenario, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline_cmd->add_option("--seed", pip_seed, "Override the scenario seed");
  pipeline_cmd->add_option("--out", pip_out, "Output directory");
  pipeline_cmd->add_flag("--dump-similarity", pip_dump,
                         "Also write per-threshold similarity matrices");
  add_sim_overrides(pipeline_cmd, pip_ov);
  add_ga_options(pipeline_cmd, pip_cfg);

  // bench
  std::string ben_scenario, ben_out;
  SimOverrides ben_ov;
  std::optional<std::uint64_t> ben_seed;
  int ben_n_seeds = 10;
  GAConfig ben_cfg;
  std::vector<Method> ben_methods{Method::kProposed, Method::kPkwik,
                                  Method::kThresholdComponents};
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Compare clustering methods across seeds on one scenario");
  bench_cmd->add_option("--scenario", ben_scenario, "Scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--seed", ben_seed,
                        "First seed (default: the scenario seed)");
  bench_cmd->add_option("--seeds", ben_n_seeds, "Number of consecutive seeds")
      ->capture_default_str();
  static const std::map<std::string, Method> method_map{
      {"proposed", Method::kProposed},
      {"pkwik", Method::kPkwik},
      {"threshold-components", Method::kThresholdComponents}};
  bench_cmd
      ->add_option("--methods", ben_methods,
                   "Methods to run (default: all three)")
      ->transform(CLI::CheckedTransformer(method_map, CLI::ignore_case))
      ->delimiter(',');
  bench_cmd->add_option("--out", ben_out, "Output directory");
  add_sim_overrides(bench_cmd, ben_ov);
  add_ga_options(bench_cmd, ben_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd)
      return cmd_simulate(sim_scenario, sim_ov, sim_seed, sim_out);
    if (*ingest_cmd) return cmd_ingest(ing_records, ing_out);
    if (*cluster_cmd)
      return cmd_cluster(clu_records, clu_truth, clu_cfg, clu_out, clu_dump);
    if (*evaluate_cmd) return cmd_evaluate(eva_pred, eva_truth, eva_out);
    if (*pipeline_cmd)
      return cmd_pipeline(pip_scenario, pip_ov, pip_seed, pip_cfg, pip_out,
                          pip_dump);
    if (*bench_cmd)
      return cmd_bench(ben_scenario, ben_ov, ben_seed, ben_n_seeds,
                       ben_methods, ben_cfg, ben_out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const DataMismatchError& e) {
    std::cerr << "data mismatch: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
