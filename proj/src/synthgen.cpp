#include "cargo/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cargo/errors.hpp"
#include "cargo/rng.hpp"

namespace cargo {

namespace {

constexpr int kCenterAttempts = 1000;

}  // namespace

void check_config(const GenConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("GenConfig: " + msg); };
  if (cfg.n_locations < 1) fail("n_locations must be positive");
  if (cfg.n_clusters < 1) fail("n_clusters must be positive");
  if (cfg.n_clusters > cfg.n_locations) fail("n_clusters must not exceed n_locations");
  if (!(cfg.cluster_sigma_km > 0.0) || !std::isfinite(cfg.cluster_sigma_km)) fail("cluster_sigma_km must be positive");
  if (!(cfg.bbox_km > 0.0) || !std::isfinite(cfg.bbox_km)) fail("bbox_km must be positive");
  if (!(cfg.site_fraction > 0.0 && cfg.site_fraction <= 1.0)) fail("site_fraction must lie in (0, 1]");
  if (!(cfg.min_center_separation_sigmas >= 0.0)) fail("min_center_separation_sigmas must be nonnegative");
}

std::vector<ClusteredLocation> generate_locations(const GenConfig& cfg) {
  check_config(cfg);
  Rng rng(derive_seed(cfg.seed, stream_id("synthgen/locations")));

  const double min_sep = cfg.min_center_separation_sigmas * cfg.cluster_sigma_km;
  std::vector<Point> centers;
  centers.reserve(static_cast<std::size_t>(cfg.n_clusters));
  for (int c = 0; c < cfg.n_clusters; ++c) {
    Point best{};
    double best_gap = -1.0;
    for (int attempt = 0; attempt < kCenterAttempts; ++attempt) {
      const Point cand{rng.uniform(0.0, cfg.bbox_km), rng.uniform(0.0, cfg.bbox_km)};
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& other : centers) gap = std::min(gap, euclidean(cand, other));
      if (gap > best_gap) {
        best_gap = gap;
        best = cand;
      }
      if (gap >= min_sep) break;
    }
    centers.push_back(best);
  }

  std::vector<ClusteredLocation> out;
  out.reserve(static_cast<std::size_t>(cfg.n_locations));
  for (int i = 0; i < cfg.n_locations; ++i) {
    const auto c = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_clusters)));
    const auto& center = centers[static_cast<std::size_t>(c)];
    const double x = center.x + cfg.cluster_sigma_km * rng.normal();
    const double y = center.y + cfg.cluster_sigma_km * rng.normal();
    out.push_back({Location{i, x, y, false}, c});
  }
  return out;
}

std::vector<std::pair<LocationId, LocationId>> triangulate(std::span<const Location> points) {
  std::vector<Point> pts;
  pts.reserve(points.size());
  for (const auto& l : points) pts.push_back(l.point());
  std::vector<std::pair<LocationId, LocationId>> out;
  for (const auto& [a, b] : delaunay_edges(pts)) {
    const LocationId ia = points[a].id;
    const LocationId ib = points[b].id;
    out.emplace_back(std::min(ia, ib), std::max(ia, ib));
  }
  std::sort(out.begin(), out.end());
  return out;
}

RoadNetwork build_instance(const GenConfig& cfg, std::vector<int>& clusters) {
  auto generated = generate_locations(cfg);
  std::vector<Location> locations;
  locations.reserve(generated.size());
  clusters.clear();
  for (const auto& g : generated) {
    locations.push_back(g.location);
    clusters.push_back(g.cluster);
  }

  std::vector<RoadEdge> edges;
  for (const auto& [a, b] : triangulate(locations)) {
    const auto& la = locations[static_cast<std::size_t>(a)];
    const auto& lb = locations[static_cast<std::size_t>(b)];
    const bool same_city = clusters[static_cast<std::size_t>(a)] == clusters[static_cast<std::size_t>(b)];
    edges.push_back({a, b, euclidean(la.point(), lb.point()), same_city ? kIntraCitySpeedKmh : kInterCitySpeedKmh});
  }

  // Site sample: partial Fisher-Yates over ids from a stream independent of the geometry.
  const auto n = locations.size();
  const auto n_sites = std::max<std::size_t>(
      1, std::min(n, static_cast<std::size_t>(std::llround(cfg.site_fraction * static_cast<double>(n)))));
  std::vector<LocationId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(cfg.seed, stream_id("synthgen/sites")));
  for (std::size_t i = 0; i < n_sites; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
    locations[static_cast<std::size_t>(ids[i])].is_site = true;
  }

  RoadNetwork network(std::move(locations), std::move(edges));
  if (auto v = validate(network); !v.empty()) throw ValidationError(std::move(v));
  return network;
}

RoadNetwork build_instance(const GenConfig& cfg) {
  std::vector<int> clusters;
  return build_instance(cfg, clusters);
}

}  // namespace cargo
