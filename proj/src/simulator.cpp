#include "sectorize/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace sectorize {

double SegmentSpec::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    len += (points[i + 1] - points[i]).norm();
  return len;
}

void SimConfig::validate() const {
  if (detection_radius <= 0.0 || radio_radius <= 0.0)
    throw InputError("sim: radii must be positive");
  if (message_loss_prob < 0.0 || message_loss_prob > 1.0)
    throw InputError("sim: message_loss_prob must lie in [0, 1]");
  if (n_vehicles < 0 || n_pedestrians < 0)
    throw InputError("sim: element counts must be non-negative");
  if (duration <= 0.0) throw InputError("sim: duration must be positive");
  if (report_period <= 0.0)
    throw InputError("sim: report_period must be positive");
  if (advert_ttl <= 0.0) throw InputError("sim: advert_ttl must be positive");
  if (vehicle_speed_min <= 0.0 || vehicle_speed_max < vehicle_speed_min)
    throw InputError("sim: vehicle speed range is invalid");
  if (pedestrian_speed <= 0.0)
    throw InputError("sim: pedestrian_speed must be positive");
  if (max_route_segments < 1)
    throw InputError("sim: max_route_segments must be >= 1");
}

namespace {

// Point at arc-length s along the polyline.
Eigen::Vector2d point_at(const std::vector<Eigen::Vector2d>& points,
                         double s) {
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double piece = (points[i + 1] - points[i]).norm();
    if (s <= piece || i + 2 == points.size()) {
      double f = piece > 0.0 ? std::min(s / piece, 1.0) : 0.0;
      return points[i] + f * (points[i + 1] - points[i]);
    }
    s -= piece;
  }
  return points.back();
}

std::pair<std::int64_t, std::int64_t> junction_key(
    const Eigen::Vector2d& p) {
  return {static_cast<std::int64_t>(std::llround(p.x() * 1e6)),
          static_cast<std::int64_t>(std::llround(p.y() * 1e6))};
}

}  // namespace

NodeTable RoadNetwork::node_table() const {
  NodeTable t;
  for (const Light& l : lights) t.insert(l.name);
  return t;
}

Chromosome RoadNetwork::ground_truth() const {
  Chromosome c;
  c.labels.reserve(lights.size());
  for (const Light& l : lights) c.labels.push_back(l.segment);
  return canonicalized(c);
}

RoadNetwork build_network(const NetworkSpec& spec) {
  if (spec.spacing <= 0.0) throw InputError("network: spacing must be positive");
  if (spec.segments.empty())
    throw InputError("network: at least one segment required");
  RoadNetwork net;
  net.spec = spec;
  int light_id = 0;
  for (std::size_t s = 0; s < spec.segments.size(); ++s) {
    const SegmentSpec& seg = spec.segments[s];
    if (seg.points.size() < 2)
      throw InputError("network: segment " + std::to_string(s) +
                       " needs at least two points");
    if (seg.inset_start < 0.0 || seg.inset_end < 0.0)
      throw InputError("network: segment " + std::to_string(s) +
                       " has negative inset");
    double usable = seg.length() - seg.inset_start - seg.inset_end;
    int count = usable >= 0.0
                    ? static_cast<int>(std::floor(usable / spec.spacing +
                                                  1e-9)) +
                          1
                    : 0;
    if (count < 2)
      throw InputError("network: segment " + std::to_string(s) +
                       " is too short for two lights at spacing " +
                       std::to_string(spec.spacing));
    for (int k = 0; k < count; ++k) {
      Light l;
      char buf[16];
      std::snprintf(buf, sizeof buf, "L%03d", light_id++);
      l.name = buf;
      l.position = point_at(seg.points,
                            seg.inset_start + k * spec.spacing);
      l.segment = static_cast<int>(s);
      net.lights.push_back(std::move(l));
    }
  }
  return net;
}

std::vector<TrafficElement> generate_traffic(const RoadNetwork& network,
                                             const SimConfig& cfg,
                                             std::mt19937_64& rng) {
  cfg.validate();
  const std::vector<SegmentSpec>& segments = network.spec.segments;

  // (segment, end) pairs per junction point; end 0 = first point, 1 = last.
  std::map<std::pair<std::int64_t, std::int64_t>,
           std::vector<std::pair<int, int>>>
      junctions;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    junctions[junction_key(segments[s].points.front())].emplace_back(
        static_cast<int>(s), 0);
    junctions[junction_key(segments[s].points.back())].emplace_back(
        static_cast<int>(s), 1);
  }
  std::vector<std::pair<int, int>> entries;  // dead ends preferred
  for (const auto& [key, ends] : junctions)
    if (ends.size() == 1) entries.push_back(ends.front());
  if (entries.empty())
    for (const auto& [key, ends] : junctions)
      for (const auto& e : ends) entries.push_back(e);
  std::sort(entries.begin(), entries.end());

  std::uniform_real_distribution<double> spawn_dist(0.0, cfg.duration);
  std::uniform_int_distribution<std::size_t> entry_dist(0, entries.size() - 1);
  std::uniform_real_distribution<double> vspeed(cfg.vehicle_speed_min,
                                                cfg.vehicle_speed_max);

  int total = cfg.n_vehicles + cfg.n_pedestrians;
  std::vector<TrafficElement> traffic;
  traffic.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    TrafficElement el;
    el.kind = i < cfg.n_vehicles ? ElementKind::kVehicle
                                 : ElementKind::kPedestrian;
    el.spawn_time = spawn_dist(rng);
    double walk_speed = cfg.pedestrian_speed;

    auto [seg, entry_end] = entries[entry_dist(rng)];
    while (true) {
      RouteLeg leg;
      leg.segment = seg;
      leg.forward = entry_end == 0;
      leg.speed = el.kind == ElementKind::kVehicle ? vspeed(rng) : walk_speed;
      el.legs.push_back(leg);
      if (static_cast<int>(el.legs.size()) >= cfg.max_route_segments) break;
      int exit_end = leg.forward ? 1 : 0;
      const Eigen::Vector2d& exit_point =
          exit_end == 0 ? segments[seg].points.front()
                        : segments[seg].points.back();
      const auto& incident = junctions.at(junction_key(exit_point));
      std::vector<std::pair<int, int>> onward;
      for (const auto& cand : incident)
        if (cand != std::make_pair(seg, exit_end)) onward.push_back(cand);
      if (onward.empty()) break;
      std::sort(onward.begin(), onward.end());
      std::uniform_int_distribution<std::size_t> pick(0, onward.size() - 1);
      std::tie(seg, entry_end) = onward[pick(rng)];
    }
    traffic.push_back(std::move(el));
  }
  return traffic;
}

namespace {

struct PathPiece {
  Eigen::Vector2d a, b;
  double t0 = 0.0, t1 = 0.0;
};

// The element's trajectory as timed straight pieces.
std::vector<PathPiece> element_path(const RoadNetwork& network,
                                    const TrafficElement& el) {
  std::vector<PathPiece> pieces;
  double t = el.spawn_time;
  for (const RouteLeg& leg : el.legs) {
    std::vector<Eigen::Vector2d> pts =
        network.spec.segments[static_cast<std::size_t>(leg.segment)].points;
    if (!leg.forward) std::reverse(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      double len = (pts[i + 1] - pts[i]).norm();
      if (len <= 0.0) continue;
      PathPiece p;
      p.a = pts[i];
      p.b = pts[i + 1];
      p.t0 = t;
      t += len / leg.speed;
      p.t1 = t;
      pieces.push_back(p);
    }
  }
  return pieces;
}

struct DetectionEvent {
  double time = 0.0;
  int light = 0;
  int element = 0;

  bool operator<(const DetectionEvent& other) const {
    if (time != other.time) return time < other.time;
    if (light != other.light) return light < other.light;
    return element < other.element;
  }
};

// Entry times of the element into the light's detection disc, found by
// solving |pos(t) - L|^2 = r^2 on each straight piece.
void append_entries(const std::vector<PathPiece>& path,
                    const Eigen::Vector2d& L, double r, int light,
                    int element, std::vector<DetectionEvent>& out) {
  bool inside = false;
  if (!path.empty()) {
    inside = (path.front().a - L).norm() <= r;
    if (inside) out.push_back({path.front().t0, light, element});
  }
  for (const PathPiece& p : path) {
    Eigen::Vector2d u = p.b - p.a;
    Eigen::Vector2d d0 = p.a - L;
    double a = u.squaredNorm();
    if (a <= 0.0) continue;
    double b = d0.dot(u);
    double c = d0.squaredNorm() - r * r;
    double disc = b * b - a * c;
    if (disc < 0.0) continue;  // never reaches the disc
    double sq = std::sqrt(disc);
    double s1 = (-b - sq) / a;
    double s2 = (-b + sq) / a;
    if (!inside) {
      if (s1 >= 0.0 && s1 <= 1.0) {
        out.push_back({p.t0 + s1 * (p.t1 - p.t0), light, element});
        inside = s2 > 1.0;
      }
    } else {
      if (s2 <= 1.0) inside = false;
    }
  }
}

}  // namespace

SimOutput simulate(const RoadNetwork& network,
                   std::span<const TrafficElement> traffic,
                   const SimConfig& cfg) {
  cfg.validate();
  SimOutput out;
  out.truth = network.ground_truth();

  std::size_t n_lights = network.lights.size();

  // Who hears whom: symmetric, excludes self.
  std::vector<std::vector<int>> radio_neighbors(n_lights);
  for (std::size_t i = 0; i < n_lights; ++i)
    for (std::size_t j = i + 1; j < n_lights; ++j)
      if ((network.lights[i].position - network.lights[j].position).norm() <=
          cfg.radio_radius) {
        radio_neighbors[i].push_back(static_cast<int>(j));
        radio_neighbors[j].push_back(static_cast<int>(i));
      }

  std::vector<DetectionEvent> events;
  for (std::size_t e = 0; e < traffic.size(); ++e) {
    std::vector<PathPiece> path = element_path(network, traffic[e]);
    for (std::size_t l = 0; l < n_lights; ++l)
      append_entries(path, network.lights[l].position, cfg.detection_radius,
                     static_cast<int>(l), static_cast<int>(e), events);
  }
  events.erase(std::remove_if(events.begin(), events.end(),
                              [&](const DetectionEvent& ev) {
                                return ev.time > cfg.duration;
                              }),
               events.end());
  std::sort(events.begin(), events.end());

  // Advertisement cache per light: latest observation time per sender.
  struct CacheEntry {
    double time;
    bool valid = false;
  };
  std::vector<std::vector<CacheEntry>> cache(
      n_lights, std::vector<CacheEntry>(n_lights));

  // Stream 1 of the seed is reserved for message loss; stream 0 drives
  // traffic generation (see the CLI and tests).
  std::mt19937_64 loss_rng(derive_seed(cfg.rng_seed, 1, 0));
  std::uniform_real_distribution<double> loss_roll(0.0, 1.0);

  for (const DetectionEvent& ev : events) {
    ++out.stats.detections;
    std::size_t r = static_cast<std::size_t>(ev.light);

    // Pair with the freshest live advertisement, then consume the cache:
    // the next detection should only see advertisements that arrive later.
    int best_sender = -1;
    double best_time = -1.0;
    bool had_stale = false;
    for (std::size_t s = 0; s < n_lights; ++s) {
      if (!cache[r][s].valid) continue;
      if (ev.time - cache[r][s].time > cfg.advert_ttl) {
        had_stale = true;
        continue;
      }
      if (cache[r][s].time > best_time) {
        best_time = cache[r][s].time;
        best_sender = static_cast<int>(s);
      }
    }
    if (best_sender >= 0) {
      AssociationRecord rec;
      rec.receiver = network.lights[r].name;
      rec.recv_time = ev.time;
      rec.sender = network.lights[static_cast<std::size_t>(best_sender)].name;
      rec.send_time = best_time;
      out.records.push_back(std::move(rec));
      ++out.stats.records;
      for (CacheEntry& entry : cache[r]) entry.valid = false;
    } else if (had_stale) {
      ++out.stats.expired_cache_hits;
    }

    // Advertise this observation to everyone in radio range.
    for (int nb : radio_neighbors[r]) {
      if (cfg.message_loss_prob > 0.0 &&
          loss_roll(loss_rng) < cfg.message_loss_prob) {
        ++out.stats.dropped_messages;
        continue;
      }
      cache[static_cast<std::size_t>(nb)][r] = {ev.time, true};
    }
  }
  return out;
}

namespace {

using nlohmann::json;

SegmentSpec parse_segment(const json& j, std::size_t idx,
                          const std::string& origin) {
  SegmentSpec seg;
  if (!j.contains("points") || !j["points"].is_array() ||
      j["points"].size() < 2)
    throw InputError(origin + ": segment " + std::to_string(idx) +
                     " needs a 'points' array of at least two [x, y] pairs");
  for (const json& p : j["points"]) {
    if (!p.is_array() || p.size() != 2)
      throw InputError(origin + ": segment " + std::to_string(idx) +
                       " has a malformed point");
    seg.points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  seg.inset_start = j.value("inset_start", 0.0);
  seg.inset_end = j.value("inset_end", 0.0);
  return seg;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(origin + ": invalid JSON: " + e.what());
  }
  Scenario sc;
  try {
    sc.name = j.value("name", std::string("unnamed"));
    sc.network.spacing = j.value("spacing", 30.0);
    if (!j.contains("segments") || !j["segments"].is_array() ||
        j["segments"].empty())
      throw InputError(origin + ": 'segments' array is required");
    for (std::size_t i = 0; i < j["segments"].size(); ++i)
      sc.network.segments.push_back(
          parse_segment(j["segments"][i], i, origin));
    const json sim = j.value("sim", json::object());
    SimConfig& c = sc.sim;
    c.detection_radius = sim.value("detection_radius", c.detection_radius);
    c.radio_radius = sim.value("radio_radius", c.radio_radius);
    c.message_loss_prob = sim.value("message_loss_prob", c.message_loss_prob);
    c.n_vehicles = sim.value("vehicles", c.n_vehicles);
    c.n_pedestrians = sim.value("pedestrians", c.n_pedestrians);
    c.duration = sim.value("duration", c.duration);
    c.report_period = sim.value("report_period", c.report_period);
    c.advert_ttl = sim.value("advert_ttl", c.advert_ttl);
    if (sim.contains("vehicle_speed")) {
      const json& vs = sim["vehicle_speed"];
      if (!vs.is_array() || vs.size() != 2)
        throw InputError(origin + ": 'vehicle_speed' must be [min, max]");
      c.vehicle_speed_min = vs[0].get<double>();
      c.vehicle_speed_max = vs[1].get<double>();
    }
    c.pedestrian_speed = sim.value("pedestrian_speed", c.pedestrian_speed);
    c.max_route_segments =
        sim.value("max_route_segments", c.max_route_segments);
    c.rng_seed = sim.value("seed", c.rng_seed);
  } catch (const json::exception& e) {
    throw InputError(origin + ": bad scenario value: " + e.what());
  }
  sc.sim.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("scenario: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.filename().string());
}

}  // namespace sectorize
