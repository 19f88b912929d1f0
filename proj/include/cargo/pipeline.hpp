#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cargo/abstraction.hpp"
#include "cargo/eigensolver.hpp"
#include "cargo/netmodel.hpp"
#include "cargo/vrp.hpp"

namespace cargo {

struct PlanParams {
  int knn = kDefaultNeighbors;
  int k_regions = 0;  // 0 picks default_region_count
  std::uint64_t seed = 0;
  StopRule stop = StopRule::no_improvement_iterations(1000);
  TabuParams tabu;
  int customers_per_vehicle = 50;
  Objective objective = Objective::Distance;
  int jobs = 1;
  EigenOptions eigen;  // seed is replaced by one derived from `seed`
};

struct RegionPlan {
  int id = 0;
  VrpInstance instance;
  std::vector<LocationId> locations;  // road location of each member
  std::vector<int> vehicle_ids;       // one per route
  Solution solution;
  PlanTotals totals;
  double initial_cost = 0.0;
  long iterations = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;

  SiteIndex depot_site() const { return instance.members[static_cast<std::size_t>(instance.depot)]; }
};

struct DistributionPlan {
  std::string method;  // "partitioned" or "flat"
  PlanParams params;
  std::vector<RegionPlan> regions;
  PlanTotals totals;
  double cost = 0.0;  // sum of regional objective values
  int requested_regions = 0;
  int spectral_regions = 0;
  int isolated_sites = 0;
  int component_splits = 0;  // regions added because a cluster spanned disconnected parts
  std::string eigen_method;
  double eigen_residual = 0.0;
  int events_applied = 0;
  std::vector<std::pair<std::string, double>> timings;  // stage -> seconds

  std::size_t site_count() const;
};

/// Seed of region r's solver, derived from the root seed.
std::uint64_t region_seed(std::uint64_t root, int region);

/// Member whose summed travel time to all others is least; ties to the lowest member index.
int select_depot(const CostMatrix& costs);

/// Region instance over sorted `members` with medoid depot and default fleet size.
VrpInstance make_region_instance(const AbstractGraph& g, std::vector<SiteIndex> members,
                                 std::shared_ptr<const CostMatrix> costs, const PlanParams& params);

/// Sums regional totals and costs into the plan.
void refresh_totals(DistributionPlan& plan);

/// abstraction -> partition -> per-region cost matrix, depot, Tabu. Errors are
/// rethrown as StageError naming the failing stage.
DistributionPlan run_pipeline(const RoadNetwork& network, const PlanParams& params, AbstractGraph* graph_out = nullptr);

/// Partition and route over an already built abstract graph.
DistributionPlan plan_from_graph(const AbstractGraph& g, const PlanParams& params);

/// Baseline: one region holding every site, costs from full road shortest paths.
DistributionPlan run_flat(const RoadNetwork& network, const PlanParams& params);

/// Empty string iff every plan covers its members exactly once and each site of
/// `g` is a member of exactly one region.
std::string plan_violation(const DistributionPlan& plan, std::size_t site_count);

}  // namespace cargo
