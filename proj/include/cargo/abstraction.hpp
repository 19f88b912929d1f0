#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cargo/netmodel.hpp"

namespace cargo {

using SiteIndex = std::int32_t;

inline constexpr int kDefaultNeighbors = 10;

/// One stored abstract-graph entry: shortest travel time and the length of that path.
struct SpfEntry {
  LocationId target = kNoLocation;
  double time_h = 0.0;
  double dist_km = 0.0;
  friend bool operator==(const SpfEntry&, const SpfEntry&) = default;
};

/**
 * Dijkstra over travel_time_h from `source`, stopping once the K nearest other
 * sites are settled (or the component is exhausted). Entries come back in
 * settle order: increasing time, ties to the lower location id.
 */
std::vector<SpfEntry> spf_row(const RoadNetwork& network, LocationId source, int k_neighbors);

struct AbstractEntry {
  SiteIndex site = 0;
  double time_h = 0.0;
  double dist_km = 0.0;
  friend bool operator==(const AbstractEntry&, const AbstractEntry&) = default;
};

/**
 * Sparse site-to-site travel-time graph. Site i is the i-th site visit; row i
 * holds its K nearest sites. Several visits may share one road location (an
 * extra parcel dropped at an existing site).
 */
class AbstractGraph {
public:
  AbstractGraph() = default;
  AbstractGraph(int k_neighbors, std::vector<LocationId> site_locations, std::vector<Point> coords,
                std::vector<std::vector<AbstractEntry>> rows);

  int k_neighbors() const noexcept { return k_; }
  std::size_t size() const noexcept { return sites_.size(); }
  LocationId location(SiteIndex s) const { return sites_.at(static_cast<std::size_t>(s)); }
  const Point& coords(SiteIndex s) const { return coords_.at(static_cast<std::size_t>(s)); }
  const std::vector<LocationId>& site_locations() const noexcept { return sites_; }
  const std::vector<Point>& site_coords() const noexcept { return coords_; }
  std::span<const AbstractEntry> row(SiteIndex s) const { return rows_.at(static_cast<std::size_t>(s)); }
  const std::vector<std::vector<AbstractEntry>>& rows() const noexcept { return rows_; }

  /// First site visit at a road location, or -1.
  SiteIndex site_at(LocationId loc) const;
  std::span<const SiteIndex> visits_at(LocationId loc) const;

  /// Stored entry (i, j) if present.
  const AbstractEntry* find(SiteIndex i, SiteIndex j) const;

  /// Appends a visit with its row; returns its index.
  SiteIndex add_site(LocationId loc, const Point& p, std::vector<AbstractEntry> row);
  void set_row(SiteIndex s, std::vector<AbstractEntry> row);

  /// Undirected adjacency: union of stored entries in both directions, minimum time per pair.
  std::vector<std::vector<AbstractEntry>> undirected_adjacency() const;

  /// Connected component id per site over undirected_adjacency().
  std::vector<int> components() const;

  friend bool operator==(const AbstractGraph& a, const AbstractGraph& b) {
    return a.k_ == b.k_ && a.sites_ == b.sites_ && a.rows_ == b.rows_;
  }

private:
  int k_ = kDefaultNeighbors;
  std::vector<LocationId> sites_;
  std::vector<Point> coords_;
  std::vector<std::vector<AbstractEntry>> rows_;
  std::map<LocationId, std::vector<SiteIndex>> by_location_;
};

/// Maps an spf_row onto visit indices (every visit at a settled location), skipping `self`.
/// Other visits sharing self's location come first with zero cost.
std::vector<AbstractEntry> to_abstract_row(const AbstractGraph& g, std::span<const SpfEntry> row, SiteIndex self);

/// One spf_row per site of the network. Rows are computed on `jobs` threads.
AbstractGraph build_abstract_graph(const RoadNetwork& network, int k_neighbors, int jobs = 1);

/// Dense row-major n x n pair of matrices: travel time (h) and distance (km).
class CostMatrix {
public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), time_(n * n, 0.0), dist_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double time(std::size_t i, std::size_t j) const noexcept { return time_[i * n_ + j]; }
  double dist(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double t, double d) noexcept {
    time_[i * n_ + j] = t;
    dist_[i * n_ + j] = d;
  }
  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<double> time_;
  std::vector<double> dist_;
};

/// All-pairs (t, d) among `members` via shortest paths over the abstract graph.
/// Throws UnreachableError naming the first disconnected pair.
CostMatrix region_cost_matrix(const AbstractGraph& g, std::span<const SiteIndex> members);

/// All-pairs (t, d) among road locations by full Dijkstra on the road network.
CostMatrix road_cost_matrix(const RoadNetwork& network, std::span<const LocationId> locations);

/// Thread-safe memo of region_cost_matrix keyed by the member list.
class RegionCostCache {
public:
  explicit RegionCostCache(const AbstractGraph& g) : graph_(g) {}
  std::shared_ptr<const CostMatrix> get(std::span<const SiteIndex> members);
  std::size_t size() const;

private:
  const AbstractGraph& graph_;
  mutable std::mutex mutex_;
  std::map<std::vector<SiteIndex>, std::shared_ptr<const CostMatrix>> cache_;
};

/// `# ...` comment, `H <K> <site_count>`, `S <location> <x> <y>` per visit, `R <site> <neighbor> <t_h> <d_km>`.
/// Sites in R records are visit indices.
std::string serialize_abstract_graph(const AbstractGraph& g);
AbstractGraph parse_abstract_graph(std::string_view text);

}  // namespace cargo
