#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cargo/delaunay.hpp"
#include "cargo/netmodel.hpp"

namespace cargo {

inline constexpr double kIntraCitySpeedKmh = 50.0;
inline constexpr double kInterCitySpeedKmh = 90.0;

/// Synthetic benchmark instance parameters. Defaults are the values used by the benchmarks.
struct GenConfig {
  int n_locations = 1000;
  int n_clusters = 10;
  double cluster_sigma_km = 3.0;
  double bbox_km = 100.0;
  double site_fraction = 1.0;
  // Preferred minimum distance between cluster centres, in multiples of sigma.
  // Centres are rejection-sampled; when the box is too crowded the best of the
  // attempted candidates is kept, so this is a soft constraint.
  double min_center_separation_sigmas = 6.0;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument describing the first bad field.
void check_config(const GenConfig& cfg);

struct ClusteredLocation {
  Location location;
  int cluster = 0;
};

/// Gaussian city clusters around centres drawn uniformly in [0, bbox]^2.
std::vector<ClusteredLocation> generate_locations(const GenConfig& cfg);

/// Delaunay edge set over the given locations, as (lower id, higher id) pairs.
std::vector<std::pair<LocationId, LocationId>> triangulate(std::span<const Location> points);

/// Full instance: clustered locations, Delaunay roads, 50/90 km/h speed tiers, sampled sites.
RoadNetwork build_instance(const GenConfig& cfg);

/// Like build_instance but also returns the generating cluster of each location.
RoadNetwork build_instance(const GenConfig& cfg, std::vector<int>& clusters);

}  // namespace cargo
