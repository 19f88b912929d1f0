#include "cargo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"
#include "cargo/partition.hpp"
#include "cargo/rng.hpp"

namespace cargo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void solve_region(RegionPlan& rp, const PlanParams& params) {
  const auto report = solve(rp.instance, params.stop, rp.seed, params.tabu);
  rp.solution = report.best;
  rp.initial_cost = report.initial_cost;
  rp.iterations = report.iterations;
  rp.wall_seconds = report.wall_seconds;
  rp.totals = solution_totals(rp.instance, rp.solution);
}

std::vector<int> sequential_ids(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

std::size_t DistributionPlan::site_count() const {
  std::size_t n = 0;
  for (const auto& r : regions) n += r.instance.members.size();
  return n;
}

std::uint64_t region_seed(std::uint64_t root, int region) {
  return derive_seed(derive_seed(root, stream_id("vrp")), static_cast<std::uint64_t>(region));
}

int select_depot(const CostMatrix& costs) {
  const auto n = costs.size();
  if (n == 0) throw std::invalid_argument("select_depot: empty member set");
  int best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += costs.time(i, j);
    if (s < best_sum) {
      best_sum = s;
      best = static_cast<int>(i);
    }
  }
  return best;
}

VrpInstance make_region_instance(const AbstractGraph& g, std::vector<SiteIndex> members,
                                 std::shared_ptr<const CostMatrix> costs, const PlanParams& params) {
  VrpInstance inst;
  for (auto s : members) inst.coords.push_back(g.coords(s));
  inst.members = std::move(members);
  inst.depot = select_depot(*costs);
  inst.costs = std::move(costs);
  inst.n_vehicles = default_vehicle_count(inst.customer_count(), params.customers_per_vehicle);
  inst.objective = params.objective;
  return inst;
}

void refresh_totals(DistributionPlan& plan) {
  plan.totals = {};
  plan.cost = 0.0;
  for (const auto& r : plan.regions) {
    plan.totals.distance_km += r.totals.distance_km;
    plan.totals.time_h += r.totals.time_h;
    plan.cost += r.solution.cost;
  }
}

DistributionPlan plan_from_graph(const AbstractGraph& g, const PlanParams& params) {
  DistributionPlan plan;
  plan.method = "partitioned";
  plan.params = params;
  const int k = params.k_regions > 0 ? params.k_regions : default_region_count(g.size());
  plan.requested_regions = k;

  auto t0 = Clock::now();
  const auto part = stage("partition", [&] {
    return partition_graph(g, std::min<int>(k, static_cast<int>(g.size())), derive_seed(params.seed, stream_id("partition")),
                           params.eigen);
  });
  plan.timings.emplace_back("partition", seconds_since(t0));
  plan.spectral_regions = part.spectral_k;
  plan.isolated_sites = static_cast<int>(part.isolated.size());
  if (part.embedding) {
    plan.eigen_method = part.embedding->method;
    plan.eigen_residual = part.embedding->max_residual;
  }

  // A cluster that straddles disconnected parts of the abstract graph cannot be
  // routed as one region, so each part becomes its own region.
  const auto comp = g.components();
  std::vector<std::vector<SiteIndex>> regions;
  for (const auto& members : part.regions()) {
    std::map<int, std::vector<SiteIndex>> by_comp;
    for (auto s : members) by_comp[comp[static_cast<std::size_t>(s)]].push_back(s);
    std::vector<std::vector<SiteIndex>> pieces;
    for (auto& [c, v] : by_comp) pieces.push_back(std::move(v));
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    plan.component_splits += static_cast<int>(pieces.size()) - 1;
    for (auto& p : pieces) regions.push_back(std::move(p));
  }

  t0 = Clock::now();
  plan.regions.resize(regions.size());
  stage("costs", [&] {
    parallel_for(regions.size(), params.jobs, [&](std::size_t r) {
      auto costs = std::make_shared<const CostMatrix>(region_cost_matrix(g, regions[r]));
      auto& rp = plan.regions[r];
      rp.id = static_cast<int>(r);
      for (auto s : regions[r]) rp.locations.push_back(g.location(s));
      rp.instance = make_region_instance(g, regions[r], std::move(costs), params);
      rp.vehicle_ids = sequential_ids(rp.instance.n_vehicles);
      rp.seed = region_seed(params.seed, rp.id);
    });
  });
  plan.timings.emplace_back("costs", seconds_since(t0));

  t0 = Clock::now();
  stage("routing", [&] { parallel_for(plan.regions.size(), params.jobs, [&](std::size_t r) { solve_region(plan.regions[r], params); }); });
  plan.timings.emplace_back("routing", seconds_since(t0));
  refresh_totals(plan);
  return plan;
}

DistributionPlan run_pipeline(const RoadNetwork& network, const PlanParams& params, AbstractGraph* graph_out) {
  const auto t0 = Clock::now();
  auto g = stage("abstraction", [&] { return build_abstract_graph(network, params.knn, params.jobs); });
  const double t_abs = seconds_since(t0);
  auto plan = plan_from_graph(g, params);
  plan.timings.insert(plan.timings.begin(), {"abstraction", t_abs});
  if (graph_out) *graph_out = std::move(g);
  return plan;
}

DistributionPlan run_flat(const RoadNetwork& network, const PlanParams& params) {
  DistributionPlan plan;
  plan.method = "flat";
  plan.params = params;
  plan.requested_regions = 1;
  plan.spectral_regions = 1;

  auto t0 = Clock::now();
  const auto sites = network.sites();
  if (sites.empty()) throw StageError("costs", "network has no sites");
  auto costs = stage("costs", [&] { return std::make_shared<const CostMatrix>(road_cost_matrix(network, sites)); });
  plan.timings.emplace_back("costs", seconds_since(t0));

  auto& rp = plan.regions.emplace_back();
  rp.locations = sites;
  for (auto id : sites) rp.instance.coords.push_back(network.location(id).point());
  rp.instance.members = sequential_ids(static_cast<int>(sites.size()));
  rp.instance.depot = select_depot(*costs);
  rp.instance.costs = std::move(costs);
  rp.instance.n_vehicles = default_vehicle_count(rp.instance.customer_count(), params.customers_per_vehicle);
  rp.instance.objective = params.objective;
  rp.vehicle_ids = sequential_ids(rp.instance.n_vehicles);
  rp.seed = region_seed(params.seed, 0);

  t0 = Clock::now();
  stage("routing", [&] { solve_region(rp, params); });
  plan.timings.emplace_back("routing", seconds_since(t0));
  refresh_totals(plan);
  return plan;
}

std::string plan_violation(const DistributionPlan& plan, std::size_t site_count) {
  std::vector<int> owner(site_count, -1);
  for (const auto& r : plan.regions) {
    const auto& inst = r.instance;
    if (auto why = coverage_violation(inst, r.solution); !why.empty())
      return "region " + std::to_string(r.id) + ": " + why;
    if (r.solution.routes.size() != r.vehicle_ids.size())
      return "region " + std::to_string(r.id) + ": route and vehicle counts differ";
    for (auto s : inst.members) {
      if (s < 0 || static_cast<std::size_t>(s) >= site_count) return "unknown site " + std::to_string(s);
      if (owner[static_cast<std::size_t>(s)] >= 0)
        return "site " + std::to_string(s) + " in regions " + std::to_string(owner[static_cast<std::size_t>(s)]) +
               " and " + std::to_string(r.id);
      owner[static_cast<std::size_t>(s)] = r.id;
    }
  }
  for (std::size_t s = 0; s < site_count; ++s)
    if (owner[s] < 0) return "site " + std::to_string(s) + " not in any region";
  return {};
}

}  // namespace cargo
