#include "cargo/abstraction.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"

namespace cargo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-heap on (time, id): equal times settle the lower id first.
template <typename Id>
using MinQueue = std::priority_queue<std::pair<double, Id>, std::vector<std::pair<double, Id>>, std::greater<>>;

}  // namespace

std::vector<SpfEntry> spf_row(const RoadNetwork& network, LocationId source, int k_neighbors) {
  if (source < 0 || static_cast<std::size_t>(source) >= network.size())
    throw std::invalid_argument("spf_row: unknown location " + std::to_string(source));
  if (!network.location(source).is_site)
    throw std::invalid_argument("spf_row: location " + std::to_string(source) + " is not a site");
  if (k_neighbors < 1) throw std::invalid_argument("spf_row: K must be positive");

  const auto n = network.size();
  std::vector<double> time(n, kInf);
  std::vector<double> dist(n, 0.0);
  std::vector<char> settled(n, 0);
  std::vector<SpfEntry> row;
  MinQueue<LocationId> frontier;

  time[static_cast<std::size_t>(source)] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [t, u] = frontier.top();
    frontier.pop();
    const auto ui = static_cast<std::size_t>(u);
    if (settled[ui]) continue;
    settled[ui] = 1;
    if (u != source && network.location(u).is_site) {
      row.push_back({u, t, dist[ui]});
      if (static_cast<int>(row.size()) >= k_neighbors) break;
    }
    for (const auto& inc : network.incident(u)) {
      const auto vi = static_cast<std::size_t>(inc.neighbor);
      if (settled[vi]) continue;
      const auto& e = network.edges()[inc.edge];
      const double nt = t + e.travel_time_h();
      if (nt < time[vi]) {
        time[vi] = nt;
        dist[vi] = dist[ui] + e.length_km;
        frontier.emplace(nt, inc.neighbor);
      }
    }
  }
  return row;
}

AbstractGraph::AbstractGraph(int k_neighbors, std::vector<LocationId> site_locations, std::vector<Point> coords,
                             std::vector<std::vector<AbstractEntry>> rows)
    : k_(k_neighbors), sites_(std::move(site_locations)), coords_(std::move(coords)), rows_(std::move(rows)) {
  if (sites_.size() != coords_.size() || sites_.size() != rows_.size())
    throw std::invalid_argument("AbstractGraph: sites, coords and rows must have equal length");
  for (std::size_t i = 0; i < sites_.size(); ++i) by_location_[sites_[i]].push_back(static_cast<SiteIndex>(i));
}

SiteIndex AbstractGraph::site_at(LocationId loc) const {
  const auto it = by_location_.find(loc);
  return it == by_location_.end() ? -1 : it->second.front();
}

std::span<const SiteIndex> AbstractGraph::visits_at(LocationId loc) const {
  const auto it = by_location_.find(loc);
  if (it == by_location_.end()) return {};
  return it->second;
}

const AbstractEntry* AbstractGraph::find(SiteIndex i, SiteIndex j) const {
  for (const auto& e : row(i))
    if (e.site == j) return &e;
  return nullptr;
}

SiteIndex AbstractGraph::add_site(LocationId loc, const Point& p, std::vector<AbstractEntry> row) {
  const auto idx = static_cast<SiteIndex>(sites_.size());
  sites_.push_back(loc);
  coords_.push_back(p);
  rows_.push_back(std::move(row));
  by_location_[loc].push_back(idx);
  return idx;
}

void AbstractGraph::set_row(SiteIndex s, std::vector<AbstractEntry> row) {
  rows_.at(static_cast<std::size_t>(s)) = std::move(row);
}

std::vector<std::vector<AbstractEntry>> AbstractGraph::undirected_adjacency() const {
  const auto n = sites_.size();
  std::vector<std::vector<AbstractEntry>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& e : rows_[i]) {
      adj[i].push_back(e);
      adj[static_cast<std::size_t>(e.site)].push_back({static_cast<SiteIndex>(i), e.time_h, e.dist_km});
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [](const AbstractEntry& a, const AbstractEntry& b) {
      return a.site != b.site ? a.site < b.site : a.time_h < b.time_h;
    });
    list.erase(std::unique(list.begin(), list.end(),
                           [](const AbstractEntry& a, const AbstractEntry& b) { return a.site == b.site; }),
               list.end());
  }
  return adj;
}

std::vector<int> AbstractGraph::components() const {
  const auto adj = undirected_adjacency();
  std::vector<int> comp(adj.size(), -1);
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& e : adj[u]) {
        const auto v = static_cast<std::size_t>(e.site);
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

std::vector<AbstractEntry> to_abstract_row(const AbstractGraph& g, std::span<const SpfEntry> row, SiteIndex self) {
  std::vector<AbstractEntry> out;
  if (self >= 0 && static_cast<std::size_t>(self) < g.size()) {
    for (SiteIndex s : g.visits_at(g.location(self)))
      if (s != self) out.push_back({s, 0.0, 0.0});
  }
  for (const auto& e : row) {
    for (SiteIndex s : g.visits_at(e.target)) {
      if (s != self) out.push_back({s, e.time_h, e.dist_km});
    }
  }
  return out;
}

AbstractGraph build_abstract_graph(const RoadNetwork& network, int k_neighbors, int jobs) {
  const auto site_ids = network.sites();
  if (site_ids.empty()) throw std::invalid_argument("build_abstract_graph: network has no sites");
  if (k_neighbors < 1) throw std::invalid_argument("build_abstract_graph: K must be positive");

  std::vector<Point> coords;
  for (auto id : site_ids) coords.push_back(network.location(id).point());
  std::vector<std::vector<SpfEntry>> raw(site_ids.size());
  parallel_for(site_ids.size(), jobs, [&](std::size_t i) { raw[i] = spf_row(network, site_ids[i], k_neighbors); });

  AbstractGraph g(k_neighbors, site_ids, std::move(coords), std::vector<std::vector<AbstractEntry>>(site_ids.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) g.set_row(static_cast<SiteIndex>(i), to_abstract_row(g, raw[i], static_cast<SiteIndex>(i)));
  return g;
}

CostMatrix region_cost_matrix(const AbstractGraph& g, std::span<const SiteIndex> members) {
  if (members.empty()) throw std::invalid_argument("region_cost_matrix: empty member set");
  const auto n_sites = g.size();
  for (auto m : members)
    if (m < 0 || static_cast<std::size_t>(m) >= n_sites)
      throw std::invalid_argument("region_cost_matrix: unknown site " + std::to_string(m));

  const auto adj = g.undirected_adjacency();
  const auto m = members.size();
  CostMatrix out(m);
  std::vector<int> member_slot(n_sites, -1);
  for (std::size_t i = 0; i < m; ++i) member_slot[static_cast<std::size_t>(members[i])] = static_cast<int>(i);

  std::vector<double> time(n_sites, kInf);
  std::vector<double> dist(n_sites, 0.0);
  std::vector<char> settled(n_sites, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < m; ++i) {
    for (auto v : touched) {
      time[v] = kInf;
      dist[v] = 0.0;
      settled[v] = 0;
    }
    touched.clear();

    const auto src = static_cast<std::size_t>(members[i]);
    std::size_t remaining = m;
    MinQueue<SiteIndex> frontier;
    time[src] = 0.0;
    touched.push_back(src);
    frontier.emplace(0.0, members[i]);
    while (!frontier.empty() && remaining > 0) {
      const auto [t, u] = frontier.top();
      frontier.pop();
      const auto ui = static_cast<std::size_t>(u);
      if (settled[ui]) continue;
      settled[ui] = 1;
      if (const int slot = member_slot[ui]; slot >= 0) {
        out.set(i, static_cast<std::size_t>(slot), t, dist[ui]);
        --remaining;
      }
      for (const auto& e : adj[ui]) {
        const auto vi = static_cast<std::size_t>(e.site);
        if (settled[vi]) continue;
        const double nt = t + e.time_h;
        if (nt < time[vi]) {
          if (time[vi] == kInf) touched.push_back(vi);
          time[vi] = nt;
          dist[vi] = dist[ui] + e.dist_km;
          frontier.emplace(nt, e.site);
        }
      }
    }
    if (remaining > 0) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!settled[static_cast<std::size_t>(members[j])]) {
          throw UnreachableError(members[i], members[j],
                                 "sites " + std::to_string(members[i]) + " and " + std::to_string(members[j]) +
                                     " are mutually unreachable in the abstract graph");
        }
      }
    }
  }
  return out;
}

CostMatrix road_cost_matrix(const RoadNetwork& network, std::span<const LocationId> locations) {
  const auto n = network.size();
  const auto m = locations.size();
  CostMatrix out(m);
  std::vector<std::vector<int>> slots(n);
  for (std::size_t i = 0; i < m; ++i) slots.at(static_cast<std::size_t>(locations[i])).push_back(static_cast<int>(i));

  std::vector<double> time(n);
  std::vector<double> dist(n);
  std::vector<char> settled(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(time.begin(), time.end(), kInf);
    std::fill(dist.begin(), dist.end(), 0.0);
    std::fill(settled.begin(), settled.end(), 0);
    std::size_t remaining = m;
    MinQueue<LocationId> frontier;
    const auto src = locations[i];
    time[static_cast<std::size_t>(src)] = 0.0;
    frontier.emplace(0.0, src);
    while (!frontier.empty() && remaining > 0) {
      const auto [t, u] = frontier.top();
      frontier.pop();
      const auto ui = static_cast<std::size_t>(u);
      if (settled[ui]) continue;
      settled[ui] = 1;
      for (int slot : slots[ui]) {
        out.set(i, static_cast<std::size_t>(slot), t, dist[ui]);
        --remaining;
      }
      for (const auto& inc : network.incident(u)) {
        const auto vi = static_cast<std::size_t>(inc.neighbor);
        if (settled[vi]) continue;
        const auto& e = network.edges()[inc.edge];
        const double nt = t + e.travel_time_h();
        if (nt < time[vi]) {
          time[vi] = nt;
          dist[vi] = dist[ui] + e.length_km;
          frontier.emplace(nt, inc.neighbor);
        }
      }
    }
    if (remaining > 0) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!settled[static_cast<std::size_t>(locations[j])])
          throw UnreachableError(locations[i], locations[j],
                                 "locations " + std::to_string(locations[i]) + " and " +
                                     std::to_string(locations[j]) + " are not connected by road");
      }
    }
  }
  return out;
}

std::shared_ptr<const CostMatrix> RegionCostCache::get(std::span<const SiteIndex> members) {
  std::vector<SiteIndex> key(members.begin(), members.end());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto value = std::make_shared<const CostMatrix>(region_cost_matrix(graph_, members));
  std::lock_guard lock(mutex_);
  return cache_.emplace(std::move(key), std::move(value)).first->second;
}

std::size_t RegionCostCache::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::string serialize_abstract_graph(const AbstractGraph& g) {
  std::string out = "# abstract graph: K nearest sites by travel time\n";
  out += "H " + std::to_string(g.k_neighbors()) + ' ' + std::to_string(g.size()) + '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& p = g.site_coords()[i];
    out += "S " + std::to_string(g.site_locations()[i]) + ' ' + format_double(p.x) + ' ' + format_double(p.y) + '\n';
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& e : g.rows()[i]) {
      out += "R " + std::to_string(i) + ' ' + std::to_string(e.site) + ' ' + format_double(e.time_h) + ' ' +
             format_double(e.dist_km) + '\n';
    }
  }
  return out;
}

namespace {

template <typename T>
T field(std::string_view s, std::size_t line) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError(line, "bad field '" + std::string(s) + "'");
  return v;
}

}  // namespace

AbstractGraph parse_abstract_graph(std::string_view text) {
  int k = 0;
  long declared = -1;
  std::vector<LocationId> sites;
  std::vector<Point> coords;
  std::vector<std::tuple<SiteIndex, SiteIndex, double, double>> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    std::vector<std::string_view> f;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\r') ++j;
      if (j > i) f.push_back(line.substr(i, j - i));
      i = j;
    }
    if (f.empty()) continue;
    if (f[0] == "H" && f.size() == 3) {
      k = field<int>(f[1], line_no);
      declared = field<long>(f[2], line_no);
    } else if (f[0] == "S" && f.size() == 4) {
      sites.push_back(field<LocationId>(f[1], line_no));
      coords.push_back({field<double>(f[2], line_no), field<double>(f[3], line_no)});
    } else if (f[0] == "R" && f.size() == 5) {
      entries.emplace_back(field<SiteIndex>(f[1], line_no), field<SiteIndex>(f[2], line_no),
                           field<double>(f[3], line_no), field<double>(f[4], line_no));
    } else {
      throw ParseError(line_no, "unrecognised record");
    }
  }
  if (declared < 0) throw ParseError(line_no, "missing H header");
  if (static_cast<long>(sites.size()) != declared)
    throw ParseError(line_no, "site count does not match header");
  std::vector<std::vector<AbstractEntry>> rows(sites.size());
  for (const auto& [i, j, t, d] : entries) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= sites.size() || static_cast<std::size_t>(j) >= sites.size())
      throw ParseError(line_no, "row references unknown site");
    rows[static_cast<std::size_t>(i)].push_back({j, t, d});
  }
  return AbstractGraph(k, std::move(sites), std::move(coords), std::move(rows));
}

}  // namespace cargo
