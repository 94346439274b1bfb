#pragma once

#include "sectorize/chromosome.hpp"
#include "sectorize/common.hpp"
#include "sectorize/graph.hpp"
#include "sectorize/ingest.hpp"

#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sectorize {

// One road segment: a polyline in metres. Lights are placed along it at the
// network spacing, keeping the given light-free margins at either end (used
// to stop segments that meet at a junction from stacking lights on the shared
// point).
struct SegmentSpec {
  std::vector<Eigen::Vector2d> points;
  double inset_start = 0.0;
  double inset_end = 0.0;

  double length() const;
};

struct NetworkSpec {
  std::vector<SegmentSpec> segments;
  double spacing = 30.0;
};

struct Light {
  std::string name;
  Eigen::Vector2d position;
  int segment = 0;
};

struct RoadNetwork {
  NetworkSpec spec;
  std::vector<Light> lights;

  NodeTable node_table() const;
  // One sector per segment; this is what clustering tries to recover.
  Chromosome ground_truth() const;
};

// Places lights every `spacing` metres from inset_start towards the segment
// end. Rejects segments that would carry fewer than two lights.
RoadNetwork build_network(const NetworkSpec& spec);

struct SimConfig {
  double detection_radius = 15.0;  // metres; element sensing range
  double radio_radius = 50.0;      // metres; advertisement reach
  double message_loss_prob = 0.0;  // per delivery attempt
  int n_vehicles = 0;
  int n_pedestrians = 0;
  double duration = 900.0;         // seconds of simulated time
  double report_period = 60.0;     // batching period for uploaded records
  // Cached advertisements older than this are never paired with; bounds how
  // stale a predecessor claim can get during quiet spells.
  double advert_ttl = 60.0;
  double vehicle_speed_min = 8.0;  // m/s, redrawn per segment
  double vehicle_speed_max = 16.0;
  double pedestrian_speed = 1.4;   // m/s, constant over a route
  int max_route_segments = 8;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class ElementKind { kVehicle, kPedestrian };

struct RouteLeg {
  int segment = 0;
  bool forward = true;  // traverses the polyline in point order
  double speed = 1.0;   // m/s, constant over the leg
};

struct TrafficElement {
  ElementKind kind = ElementKind::kVehicle;
  double spawn_time = 0.0;
  std::vector<RouteLeg> legs;
};

// Routes start at a uniformly chosen dead-end (any endpoint if the network
// has none) and keep crossing junctions onto uniformly chosen other segments
// until a dead end or the leg limit. Vehicle speed is redrawn per leg.
std::vector<TrafficElement> generate_traffic(const RoadNetwork& network,
                                             const SimConfig& cfg,
                                             std::mt19937_64& rng);

struct SimStats {
  std::size_t detections = 0;
  std::size_t records = 0;
  std::size_t dropped_messages = 0;
  std::size_t expired_cache_hits = 0;  // detections whose only cache entries were stale
};

struct SimOutput {
  std::vector<AssociationRecord> records;  // ascending recv_time
  Chromosome truth;
  SimStats stats;
};

// Discrete-event pass over all element/light detection events:
// on detection a light pairs with the freshest cached advertisement (then
// drops its cache) and advertises its own observation to every light within
// radio range, subject to independent message loss.
SimOutput simulate(const RoadNetwork& network,
                   std::span<const TrafficElement> traffic,
                   const SimConfig& cfg);

// A named, file-loadable simulation setup.
struct Scenario {
  std::string name;
  NetworkSpec network;
  SimConfig sim;
};

// Reads the JSON scenario schema (see README). Throws InputError on missing
// files or malformed content.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::string& origin);

}  // namespace sectorize
