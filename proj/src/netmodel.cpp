#include "cargo/netmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "cargo/errors.hpp"

namespace cargo {

double euclidean(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

RoadNetwork::RoadNetwork(std::vector<Location> locations, std::vector<RoadEdge> edges)
    : locations_(std::move(locations)), edges_(std::move(edges)) {
  const auto n = locations_.size();
  auto valid = [n](LocationId id) { return id >= 0 && static_cast<std::size_t>(id) < n; };

  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges_) {
    if (!valid(e.from) || !valid(e.to)) continue;
    ++degree[static_cast<std::size_t>(e.from)];
    if (e.to != e.from) ++degree[static_cast<std::size_t>(e.to)];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  incidences_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (!valid(e.from) || !valid(e.to)) continue;
    incidences_[fill[static_cast<std::size_t>(e.from)]++] = {e.to, k};
    if (e.to != e.from) incidences_[fill[static_cast<std::size_t>(e.to)]++] = {e.from, k};
  }
}

std::span<const Incidence> RoadNetwork::incident(LocationId id) const {
  const auto i = static_cast<std::size_t>(id);
  return {incidences_.data() + offsets_.at(i), offsets_.at(i + 1) - offsets_.at(i)};
}

std::vector<LocationId> RoadNetwork::sites() const {
  std::vector<LocationId> out;
  for (const auto& l : locations_)
    if (l.is_site) out.push_back(l.id);
  return out;
}

std::ptrdiff_t RoadNetwork::find_edge(LocationId a, LocationId b) const {
  if (a < 0 || static_cast<std::size_t>(a) >= locations_.size()) return -1;
  for (const auto& inc : incident(a))
    if (inc.neighbor == b) return static_cast<std::ptrdiff_t>(inc.edge);
  return -1;
}

LocationId RoadNetwork::nearest_location(const Point& p) const {
  LocationId best = kNoLocation;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& l : locations_) {
    const double d = euclidean(p, l.point());
    if (d < best_d) {
      best_d = d;
      best = l.id;
    }
  }
  return best;
}

std::vector<std::string> validate(const RoadNetwork& network) {
  std::vector<std::string> out;
  const auto& locs = network.locations();
  const auto n = locs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = locs[i];
    if (l.id != static_cast<LocationId>(i))
      out.push_back("location at position " + std::to_string(i) + " has id " + std::to_string(l.id) +
                    ": ids must be contiguous from 0");
    if (!std::isfinite(l.x) || !std::isfinite(l.y))
      out.push_back("location " + std::to_string(l.id) + ": coordinates must be finite");
  }
  std::set<std::pair<LocationId, LocationId>> seen;
  const auto& edges = network.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const std::string name = "edge " + std::to_string(k) + " (" + std::to_string(e.from) + "-" +
                             std::to_string(e.to) + ")";
    bool endpoints_ok = true;
    for (LocationId id : {e.from, e.to}) {
      if (id < 0 || static_cast<std::size_t>(id) >= n) {
        out.push_back(name + ": unknown location id " + std::to_string(id));
        endpoints_ok = false;
      }
    }
    if (e.from == e.to) out.push_back(name + ": self loop");
    if (!(e.length_km >= 0.0) || !std::isfinite(e.length_km))
      out.push_back(name + ": length must be finite and nonnegative");
    if (!(e.speed_kmh > 0.0) || !std::isfinite(e.speed_kmh))
      out.push_back(name + ": speed must be finite and positive");
    if (endpoints_ok && e.from != e.to) {
      const auto key = std::minmax(e.from, e.to);
      if (!seen.insert(key).second)
        out.push_back(name + ": duplicate undirected pair " + std::to_string(key.first) + "-" +
                      std::to_string(key.second));
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(field) + "'");
  return value;
}

}  // namespace

RoadNetwork parse_network(std::string_view text) {
  std::vector<Location> locations;
  std::vector<RoadEdge> edges;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto f = split_fields(line);
    if (f.empty()) continue;
    if (f[0] == "N") {
      if (f.size() != 5) throw ParseError(line_no, "expected 'N <id> <x> <y> <0|1>'");
      Location l;
      l.id = parse_field<LocationId>(f[1], line_no, "id");
      l.x = parse_field<double>(f[2], line_no, "x");
      l.y = parse_field<double>(f[3], line_no, "y");
      if (f[4] != "0" && f[4] != "1") throw ParseError(line_no, "site flag must be 0 or 1");
      l.is_site = f[4] == "1";
      locations.push_back(l);
    } else if (f[0] == "E") {
      if (f.size() != 5) throw ParseError(line_no, "expected 'E <from> <to> <length_km> <speed_kmh>'");
      RoadEdge e;
      e.from = parse_field<LocationId>(f[1], line_no, "from id");
      e.to = parse_field<LocationId>(f[2], line_no, "to id");
      e.length_km = parse_field<double>(f[3], line_no, "length");
      e.speed_kmh = parse_field<double>(f[4], line_no, "speed");
      edges.push_back(e);
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(f[0]) + "'");
    }
  }
  // Locations may be listed in any order; ids are checked for contiguity after sorting.
  std::stable_sort(locations.begin(), locations.end(),
                   [](const Location& a, const Location& b) { return a.id < b.id; });
  RoadNetwork network(std::move(locations), std::move(edges));
  if (auto v = validate(network); !v.empty()) throw ValidationError(std::move(v));
  return network;
}

RoadNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string serialize_network(const RoadNetwork& network) {
  std::string out;
  out += "# road network: " + std::to_string(network.size()) + " locations, " +
         std::to_string(network.edges().size()) + " edges\n";
  for (const auto& l : network.locations()) {
    out += "N " + std::to_string(l.id) + ' ' + format_double(l.x) + ' ' + format_double(l.y) + ' ' +
           (l.is_site ? '1' : '0') + '\n';
  }
  for (const auto& e : network.edges()) {
    out += "E " + std::to_string(e.from) + ' ' + std::to_string(e.to) + ' ' + format_double(e.length_km) +
           ' ' + format_double(e.speed_kmh) + '\n';
  }
  return out;
}

void save_network(const RoadNetwork& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write network file '" + path + "'");
  out << serialize_network(network);
}

}  // namespace cargo
