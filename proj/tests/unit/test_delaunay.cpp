#include <doctest.h>

#include <set>

#include "cargo/delaunay.hpp"
#include "cargo/rng.hpp"
#include "oracles.hpp"

using namespace cargo;

namespace {

std::vector<Point> random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
  return p;
}

// Positive when d lies strictly inside the circumcircle of counter-clockwise a, b, c.
long double in_circle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double ax = a.x - d.x, ay = a.y - d.y;
  const long double bx = b.x - d.x, by = b.y - d.y;
  const long double cx = c.x - d.x, cy = c.y - d.y;
  return (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
         (cx * cx + cy * cy) * (ax * by - bx * ay);
}

long double orient(const Point& a, const Point& b, const Point& c) {
  return static_cast<long double>(b.x - a.x) * (c.y - a.y) - static_cast<long double>(b.y - a.y) * (c.x - a.x);
}

// Every triangle whose circumcircle is empty of other points, found by brute force over all triples.
std::set<IndexEdge> brute_force_delaunay(const std::vector<Point>& p) {
  std::set<IndexEdge> edges;
  const auto n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        std::size_t a = i, b = j, c = k;
        const auto o = orient(p[a], p[b], p[c]);
        if (o == 0) continue;
        if (o < 0) std::swap(b, c);
        bool empty = true;
        for (std::size_t d = 0; d < n && empty; ++d)
          if (d != a && d != b && d != c && in_circle(p[a], p[b], p[c], p[d]) > 0) empty = false;
        if (!empty) continue;
        edges.insert({i, j});
        edges.insert({i, k});
        edges.insert({j, k});
      }
  return edges;
}

std::set<IndexEdge> euclidean_mst(const std::vector<Point>& p) {
  const auto n = p.size();
  std::vector<double> best(n, oracle::kInf);
  std::vector<std::size_t> from(n, 0);
  std::vector<char> in(n, 0);
  std::set<IndexEdge> edges;
  best[0] = 0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v] && (u == n || best[v] < best[u])) u = v;
    in[u] = 1;
    if (it > 0) edges.insert({std::min(u, from[u]), std::max(u, from[u])});
    for (std::size_t v = 0; v < n; ++v) {
      const double d = euclidean(p[u], p[v]);
      if (!in[v] && d < best[v]) {
        best[v] = d;
        from[v] = u;
      }
    }
  }
  return edges;
}

}  // namespace

TEST_CASE("degenerate inputs") {
  CHECK(delaunay_edges(std::vector<Point>{}).empty());
  CHECK(delaunay_edges(std::vector<Point>{{1, 1}}).empty());
  CHECK(delaunay_edges(std::vector<Point>{{0, 0}, {1, 1}}) == std::vector<IndexEdge>{{0, 1}});
  CHECK(delaunay_edges(std::vector<Point>{{0, 0}, {3, 0}, {1, 2}}).size() == 3);
}

TEST_CASE("square gets four sides and one diagonal") {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1.0001}};
  const auto e = delaunay_edges(sq);
  CHECK(e.size() == 5);
}

TEST_CASE("collinear points become a path along the line") {
  const std::vector<Point> line{{3, 3}, {0, 0}, {2, 2}, {1, 1}, {4, 4}};
  Delaunay d(line);
  CHECK(d.collinear());
  CHECK(d.edges() == std::vector<IndexEdge>{{0, 2}, {0, 4}, {1, 3}, {2, 3}});
}

TEST_CASE("duplicate points stay connected") {
  std::vector<Point> p = random_points(30, 5);
  p.push_back(p[3]);
  const auto e = delaunay_edges(p);
  oracle::UnionFind uf(p.size());
  for (auto [a, b] : e) uf.unite(static_cast<int>(a), static_cast<int>(b));
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(uf.find(0) == uf.find(static_cast<int>(i)));
}

TEST_CASE("matches the brute-force empty circumcircle triangulation") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto p = random_points(seed == 1 ? 200 : 60, seed);
    const auto e = delaunay_edges(p);
    const std::set<IndexEdge> got(e.begin(), e.end());
    CHECK(got.size() == e.size());
    CHECK(e.size() <= 3 * p.size() - 6);
    CHECK(got == brute_force_delaunay(p));
  }
}

TEST_CASE("contains the Euclidean minimum spanning tree") {
  const auto p = random_points(200, 17);
  const auto e = delaunay_edges(p);
  const std::set<IndexEdge> got(e.begin(), e.end());
  for (const auto& m : euclidean_mst(p)) CHECK(got.count(m) == 1);
}

TEST_CASE("grid points with cocircular quadruples triangulate without overlap") {
  std::vector<Point> p;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) p.push_back({double(i), double(j)});
  Delaunay d(p);
  // A triangulated 12x12 grid has 2*11*11 triangles and 3*11*11 + 2*11 edges.
  CHECK(d.triangles().size() == 3 * 2 * 121);
  CHECK(d.edges().size() == 3 * 121 + 22);
}
