#include "cargo/plan_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cargo {

namespace {

using json = nlohmann::ordered_json;

json stop_json(const StopRule& s) {
  if (s.mode == StopRule::Mode::WallClock) return {{"mode", "wall_clock"}, {"seconds", s.seconds}};
  return {{"mode", "iterations"}, {"iterations", s.iterations}};
}

json point_json(const Point& p) { return json::array({p.x, p.y}); }

}  // namespace

std::string plan_to_json(const DistributionPlan& plan, const PlanFormat& format) {
  const auto& p = plan.params;
  json doc;
  doc["method"] = plan.method;
  doc["params"] = {{"seed", p.seed},
                   {"knn", p.knn},
                   {"k_regions", p.k_regions},
                   {"objective", to_string(p.objective)},
                   {"customers_per_vehicle", p.customers_per_vehicle},
                   {"m_nodes", p.tabu.m_nodes},
                   {"s_targets", p.tabu.s_targets},
                   {"stop", stop_json(p.stop)}};
  doc["provenance"] = {{"requested_regions", plan.requested_regions},
                       {"spectral_regions", plan.spectral_regions},
                       {"isolated_sites", plan.isolated_sites},
                       {"component_splits", plan.component_splits},
                       {"eigen_method", plan.eigen_method},
                       {"eigen_residual", plan.eigen_residual},
                       {"depot_rule", "medoid by travel time"},
                       {"events_applied", plan.events_applied}};
  doc["totals"] = {{"distance_km", plan.totals.distance_km},
                   {"time_h", plan.totals.time_h},
                   {"cost", plan.cost},
                   {"regions", plan.regions.size()},
                   {"sites", plan.site_count()}};

  json regions = json::array();
  for (const auto& r : plan.regions) {
    json vehicles = json::array();
    for (std::size_t v = 0; v < r.solution.routes.size(); ++v) {
      json stops = json::array();
      for (int c : r.solution.routes[v]) stops.push_back(r.locations[static_cast<std::size_t>(c)]);
      vehicles.push_back({{"id", r.vehicle_ids[v]}, {"stops", std::move(stops)}});
    }
    json reg = {{"id", r.id},
                {"seed", r.seed},
                {"depot", r.locations[static_cast<std::size_t>(r.instance.depot)]},
                {"sites", r.locations},
                {"cost", r.solution.cost},
                {"initial_cost", r.initial_cost},
                {"distance_km", r.totals.distance_km},
                {"time_h", r.totals.time_h},
                {"iterations", r.iterations},
                {"vehicles", std::move(vehicles)}};
    if (format.timings) reg["wall_seconds"] = r.wall_seconds;
    regions.push_back(std::move(reg));
  }
  doc["regions"] = std::move(regions);

  if (format.timings) {
    json t = json::object();
    for (const auto& [stage, s] : plan.timings) t[stage] = s;
    doc["timings"] = std::move(t);
  }
  return doc.dump(format.indent) + '\n';
}

std::string plan_to_geojson(const DistributionPlan& plan) {
  json features = json::array();
  for (const auto& r : plan.regions) {
    const auto& inst = r.instance;
    for (int i = 0; i < inst.size(); ++i) {
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", point_json(inst.coords[static_cast<std::size_t>(i)])}}},
                          {"properties",
                           {{"location", r.locations[static_cast<std::size_t>(i)]}, {"region", r.id}, {"depot", i == inst.depot}}}});
    }
    for (std::size_t v = 0; v < r.solution.routes.size(); ++v) {
      const auto& route = r.solution.routes[v];
      if (route.empty()) continue;
      json line = json::array();
      line.push_back(point_json(inst.coords[static_cast<std::size_t>(inst.depot)]));
      for (int c : route) line.push_back(point_json(inst.coords[static_cast<std::size_t>(c)]));
      line.push_back(point_json(inst.coords[static_cast<std::size_t>(inst.depot)]));
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "LineString"}, {"coordinates", std::move(line)}}},
                          {"properties", {{"region", r.id}, {"vehicle", r.vehicle_ids[v]}}}});
    }
  }
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump() + '\n';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cargo
