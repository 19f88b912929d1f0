#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cargo {

using LocationId = std::int32_t;
inline constexpr LocationId kNoLocation = -1;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double euclidean(const Point& a, const Point& b) noexcept;

/// A road junction. Sites are the pickup/drop-off locations the plans visit.
struct Location {
  LocationId id = kNoLocation;
  double x = 0.0;  // km
  double y = 0.0;  // km
  bool is_site = false;

  Point point() const noexcept { return {x, y}; }
  friend bool operator==(const Location&, const Location&) = default;
};

struct RoadEdge {
  LocationId from = kNoLocation;
  LocationId to = kNoLocation;
  double length_km = 0.0;
  double speed_kmh = 0.0;

  double travel_time_h() const noexcept { return length_km / speed_kmh; }
  friend bool operator==(const RoadEdge&, const RoadEdge&) = default;
};

/// Adjacency entry: the neighbouring location and the index of the edge reaching it.
struct Incidence {
  LocationId neighbor;
  std::size_t edge;
};

/**
 * Undirected road network. Immutable once built; the constructor only builds
 * the adjacency lists (edges with out-of-range endpoints are left out of
 * them). Use validate() or parse_network() to enforce the model invariants.
 */
class RoadNetwork {
public:
  RoadNetwork() = default;
  RoadNetwork(std::vector<Location> locations, std::vector<RoadEdge> edges);

  const std::vector<Location>& locations() const noexcept { return locations_; }
  const std::vector<RoadEdge>& edges() const noexcept { return edges_; }
  std::span<const Incidence> incident(LocationId id) const;

  std::size_t size() const noexcept { return locations_.size(); }
  const Location& location(LocationId id) const { return locations_.at(static_cast<std::size_t>(id)); }
  std::vector<LocationId> sites() const;

  /// Index of the edge joining a and b in either orientation, or -1.
  std::ptrdiff_t find_edge(LocationId a, LocationId b) const;

  /// Nearest location to p by Euclidean distance; ties to the lower id.
  LocationId nearest_location(const Point& p) const;

  friend bool operator==(const RoadNetwork& a, const RoadNetwork& b) {
    return a.locations_ == b.locations_ && a.edges_ == b.edges_;
  }

private:
  std::vector<Location> locations_;
  std::vector<RoadEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidences_;
};

/// Every broken invariant as a human-readable line naming the entity and rule. Empty iff valid.
std::vector<std::string> validate(const RoadNetwork& network);

/// Parses the line-oriented network format; throws ParseError or ValidationError.
RoadNetwork parse_network(std::string_view text);
RoadNetwork load_network(const std::string& path);

/// Shortest round-trip decimal representation of every float, so parse(serialize(n)) == n.
std::string serialize_network(const RoadNetwork& network);
void save_network(const RoadNetwork& network, const std::string& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace cargo
