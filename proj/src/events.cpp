#include "cargo/events.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"
#include "cargo/rng.hpp"

namespace cargo {

namespace {

using json = nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<double> times_from(const AbstractGraph& g, SiteIndex source) {
  const auto adj = g.undirected_adjacency();
  std::vector<double> t(adj.size(), kInf);
  using Item = std::pair<double, SiteIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  t[static_cast<std::size_t>(source)] = 0.0;
  q.emplace(0.0, source);
  while (!q.empty()) {
    const auto [d, u] = q.top();
    q.pop();
    if (d > t[static_cast<std::size_t>(u)]) continue;
    for (const auto& e : adj[static_cast<std::size_t>(u)]) {
      const double nd = d + e.time_h;
      if (nd < t[static_cast<std::size_t>(e.site)]) {
        t[static_cast<std::size_t>(e.site)] = nd;
        q.emplace(nd, e.site);
      }
    }
  }
  return t;
}

std::vector<AbstractEntry> site_row(const RoadNetwork& net, const AbstractGraph& g, SiteIndex s) {
  const auto row = spf_row(net, g.location(s), g.k_neighbors());
  return to_abstract_row(g, row, s);
}

std::uint64_t event_seed(const RegionPlan& rp, int event_index) {
  return derive_seed(derive_seed(rp.seed, stream_id("event")), static_cast<std::uint64_t>(event_index));
}

// Re-costs the region's current solution under its (possibly new) matrix and runs Tabu from it.
void reoptimise(RegionPlan& rp, Solution start, const StopRule& stop, std::uint64_t seed, const TabuParams& tabu) {
  const auto report = improve(rp.instance, std::move(start), stop, seed, tabu);
  rp.solution = report.best;
  rp.iterations = report.iterations;
  rp.wall_seconds = report.wall_seconds;
  rp.totals = solution_totals(rp.instance, rp.solution);
}

RegionPlan& region_by_id(DistributionPlan& plan, int id) {
  for (auto& r : plan.regions)
    if (r.id == id) return r;
  throw std::invalid_argument("unknown region " + std::to_string(id));
}

EventOutcome on_new_parcel(DistributionPlan& plan, GraphState& state, const NewParcel& ev, const StopRule& stop) {
  if (plan.regions.empty()) throw std::invalid_argument("new_parcel: plan has no regions");
  const LocationId loc = state.network.nearest_location(ev.at);
  if (loc == kNoLocation) throw std::invalid_argument("new_parcel: road network is empty");

  RoadNetwork net = state.network;
  if (!net.location(loc).is_site) {
    auto locations = net.locations();
    locations[static_cast<std::size_t>(loc)].is_site = true;
    net = RoadNetwork(std::move(locations), net.edges());
  }
  AbstractGraph g = state.graph;
  const SiteIndex site = g.add_site(loc, net.location(loc).point(), {});
  g.set_row(site, site_row(net, g, site));

  const auto t = times_from(g, site);
  RegionPlan* target = nullptr;
  double best = kInf;
  for (auto& r : plan.regions) {
    const double d = t[static_cast<std::size_t>(r.depot_site())];
    if (d < best) {
      best = d;
      target = &r;
    }
  }
  if (!target)
    throw UnreachableError(loc, kNoLocation,
                           "new parcel at location " + std::to_string(loc) + " cannot reach any region depot");

  RegionPlan rp = *target;
  rp.instance.members.push_back(site);
  rp.instance.coords.push_back(g.coords(site));
  rp.locations.push_back(loc);
  rp.instance.costs = std::make_shared<const CostMatrix>(region_cost_matrix(g, rp.instance.members));
  Solution start = rp.solution;
  const int customer = rp.instance.size() - 1;
  cheapest_insert(rp.instance, start, std::span<const int>(&customer, 1));
  reoptimise(rp, std::move(start), stop, event_seed(rp, plan.events_applied), plan.params.tabu);

  *target = std::move(rp);
  state.network = std::move(net);
  state.graph = std::move(g);
  return {{target->id}, site, 0.0};
}

EventOutcome on_breakdown(DistributionPlan& plan, const VehicleBreakdown& ev, const StopRule& stop) {
  RegionPlan& live = region_by_id(plan, ev.region);
  const auto it = std::find(live.vehicle_ids.begin(), live.vehicle_ids.end(), ev.vehicle);
  if (it == live.vehicle_ids.end())
    throw std::invalid_argument("region " + std::to_string(ev.region) + " has no vehicle " + std::to_string(ev.vehicle));
  if (live.vehicle_ids.size() == 1)
    throw std::invalid_argument("vehicle " + std::to_string(ev.vehicle) + " is the last one in region " +
                                std::to_string(ev.region));

  RegionPlan rp = live;
  const auto slot = static_cast<std::size_t>(it - live.vehicle_ids.begin());
  const auto orphans = rp.solution.routes[slot];
  rp.solution.routes.erase(rp.solution.routes.begin() + static_cast<std::ptrdiff_t>(slot));
  rp.vehicle_ids.erase(rp.vehicle_ids.begin() + static_cast<std::ptrdiff_t>(slot));
  rp.instance.n_vehicles -= 1;
  Solution start = rp.solution;
  cheapest_insert(rp.instance, start, orphans);
  reoptimise(rp, std::move(start), stop, event_seed(rp, plan.events_applied), plan.params.tabu);
  live = std::move(rp);
  return {{live.id}, -1, 0.0};
}

EventOutcome on_border_closed(DistributionPlan& plan, GraphState& state, const BorderClosed& ev, const StopRule& stop) {
  std::set<std::ptrdiff_t> removed;
  for (const auto& [a, b] : ev.edges) {
    const auto e = state.network.find_edge(a, b);
    if (e < 0) throw std::invalid_argument("no road edge between " + std::to_string(a) + " and " + std::to_string(b));
    removed.insert(e);
  }
  std::vector<RoadEdge> edges;
  for (std::size_t i = 0; i < state.network.edges().size(); ++i)
    if (!removed.count(static_cast<std::ptrdiff_t>(i))) edges.push_back(state.network.edges()[i]);
  RoadNetwork net(state.network.locations(), std::move(edges));

  AbstractGraph g = state.graph;
  std::vector<std::vector<AbstractEntry>> rows(g.size());
  parallel_for(g.size(), plan.params.jobs,
               [&](std::size_t s) { rows[s] = site_row(net, g, static_cast<SiteIndex>(s)); });
  bool any_row = false;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const auto old = g.row(static_cast<SiteIndex>(s));
    if (!std::equal(old.begin(), old.end(), rows[s].begin(), rows[s].end())) {
      g.set_row(static_cast<SiteIndex>(s), std::move(rows[s]));
      any_row = true;
    }
  }

  EventOutcome out;
  std::vector<RegionPlan> updated = plan.regions;
  if (any_row) {
    std::vector<char> changed(updated.size(), 0);
    parallel_for(updated.size(), plan.params.jobs, [&](std::size_t r) {
      auto costs = std::make_shared<const CostMatrix>(region_cost_matrix(g, updated[r].instance.members));
      if (*costs == *updated[r].instance.costs) return;
      changed[r] = 1;
      updated[r].instance.costs = std::move(costs);
    });
    std::vector<std::size_t> todo;
    for (std::size_t r = 0; r < updated.size(); ++r)
      if (changed[r]) todo.push_back(r);
    parallel_for(todo.size(), plan.params.jobs, [&](std::size_t i) {
      auto& rp = updated[todo[i]];
      reoptimise(rp, rp.solution, stop, event_seed(rp, plan.events_applied), plan.params.tabu);
    });
    for (auto r : todo) out.touched_regions.push_back(updated[r].id);
  }

  plan.regions = std::move(updated);
  state.network = std::move(net);
  state.graph = std::move(g);
  return out;
}

Point point_of(const json& j, const char* x, const char* y) { return {j.at(x).get<double>(), j.at(y).get<double>()}; }

}  // namespace

std::string event_kind(const AdHocEvent& e) {
  return std::visit(overloaded{[](const NewParcel&) { return std::string("new_parcel"); },
                               [](const VehicleBreakdown&) { return std::string("vehicle_breakdown"); },
                               [](const BorderClosed&) { return std::string("border_closed"); }},
                    e);
}

EventOutcome handle_event(DistributionPlan& plan, GraphState& state, const AdHocEvent& event, const StopRule& stop) {
  const auto t0 = std::chrono::steady_clock::now();
  auto out = std::visit(
      overloaded{[&](const NewParcel& e) { return on_new_parcel(plan, state, e, stop); },
                 [&](const VehicleBreakdown& e) { return on_breakdown(plan, e, stop); },
                 [&](const BorderClosed& e) { return on_border_closed(plan, state, e, stop); }},
      event);
  ++plan.events_applied;
  refresh_totals(plan);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

AdHocEvent parse_event(std::string_view line) {
  const auto j = json::parse(line);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "new_parcel") return NewParcel{point_of(j, "x", "y")};
  if (kind == "vehicle_breakdown") return VehicleBreakdown{j.at("region").get<int>(), j.at("vehicle").get<int>()};
  if (kind == "border_closed") {
    BorderClosed b;
    for (const auto& e : j.at("edges")) b.edges.emplace_back(e.at(0).get<LocationId>(), e.at(1).get<LocationId>());
    if (b.edges.empty()) throw std::invalid_argument("border_closed needs at least one edge");
    return b;
  }
  throw std::invalid_argument("unknown event kind '" + kind + "'");
}

std::vector<AdHocEvent> parse_events(std::string_view text) {
  std::vector<AdHocEvent> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    try {
      out.push_back(parse_event(line));
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::string format_event(const AdHocEvent& e) {
  json j;
  j["kind"] = event_kind(e);
  std::visit(overloaded{[&](const NewParcel& p) {
                          j["x"] = p.at.x;
                          j["y"] = p.at.y;
                        },
                        [&](const VehicleBreakdown& b) {
                          j["region"] = b.region;
                          j["vehicle"] = b.vehicle;
                        },
                        [&](const BorderClosed& b) {
                          j["edges"] = json::array();
                          for (const auto& [a, c] : b.edges) j["edges"].push_back({a, c});
                        }},
             e);
  return j.dump();
}

}  // namespace cargo
