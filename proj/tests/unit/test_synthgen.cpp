#include <doctest.h>

#include <cmath>

#include "cargo/netmodel.hpp"
#include "cargo/synthgen.hpp"
#include "oracles.hpp"

using namespace cargo;

TEST_CASE("generation is deterministic") {
  GenConfig cfg;
  cfg.seed = 3;
  CHECK(serialize_network(build_instance(cfg)) == serialize_network(build_instance(cfg)));
  GenConfig other = cfg;
  other.seed = 4;
  CHECK(serialize_network(build_instance(other)) != serialize_network(build_instance(cfg)));
}

TEST_CASE("config checks") {
  GenConfig cfg;
  cfg.n_locations = 0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_clusters = 2000;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.cluster_sigma_km = 0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.site_fraction = 0;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
  cfg = {};
  cfg.site_fraction = 1.5;
  CHECK_THROWS_AS(check_config(cfg), std::invalid_argument);
}

TEST_CASE("single location") {
  GenConfig cfg;
  cfg.n_locations = 1;
  cfg.n_clusters = 1;
  const auto pts = generate_locations(cfg);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].cluster == 0);
  const auto net = build_instance(cfg);
  CHECK(net.edges().empty());
  CHECK(net.sites().size() == 1);
}

TEST_CASE("within-cluster spread matches sigma") {
  GenConfig cfg;
  cfg.n_locations = 1000;
  cfg.n_clusters = 10;
  cfg.cluster_sigma_km = 2.0;
  cfg.seed = 12;
  const auto pts = generate_locations(cfg);
  std::vector<double> sx(10), sy(10), sxx(10), syy(10), cnt(10);
  for (const auto& p : pts) {
    const auto c = static_cast<std::size_t>(p.cluster);
    sx[c] += p.location.x;
    sy[c] += p.location.y;
    sxx[c] += p.location.x * p.location.x;
    syy[c] += p.location.y * p.location.y;
    cnt[c] += 1;
  }
  double std_sum = 0;
  int used = 0;
  for (int c = 0; c < 10; ++c) {
    if (cnt[c] < 2) continue;
    const double vx = (sxx[c] - sx[c] * sx[c] / cnt[c]) / (cnt[c] - 1);
    const double vy = (syy[c] - sy[c] * sy[c] / cnt[c]) / (cnt[c] - 1);
    std_sum += std::sqrt(vx) + std::sqrt(vy);
    used += 2;
  }
  const double mean_std = std_sum / used;
  CHECK(mean_std >= 1.6);
  CHECK(mean_std <= 2.4);
}

TEST_CASE("speed tiers follow cluster membership") {
  GenConfig cfg;
  cfg.n_locations = 400;
  cfg.n_clusters = 5;
  cfg.seed = 8;
  std::vector<int> clusters;
  const auto net = build_instance(cfg, clusters);
  REQUIRE(clusters.size() == net.size());
  for (const auto& e : net.edges()) {
    const bool same = clusters[e.from] == clusters[e.to];
    CHECK(e.speed_kmh == (same ? kIntraCitySpeedKmh : kInterCitySpeedKmh));
    CHECK(e.length_km == euclidean(net.location(e.from).point(), net.location(e.to).point()));
    CHECK(std::abs(e.travel_time_h() * e.speed_kmh - e.length_km) <= 1e-12 * e.length_km);
  }
}

TEST_CASE("two far clusters: 50 km/h inside, 90 km/h across") {
  GenConfig cfg;
  cfg.n_locations = 4;
  cfg.n_clusters = 2;
  cfg.cluster_sigma_km = 0.01;
  cfg.bbox_km = 100;
  std::vector<int> clusters;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto net = build_instance(cfg, clusters);
    if (std::count(clusters.begin(), clusters.end(), 0) != 2) continue;
    int intra = 0, cross = 0;
    for (const auto& e : net.edges()) (clusters[e.from] == clusters[e.to] ? intra : cross) += 1;
    CHECK(intra == 2);
    CHECK(cross >= 1);
    for (const auto& e : net.edges())
      CHECK(e.speed_kmh == (clusters[e.from] == clusters[e.to] ? 50.0 : 90.0));
    return;
  }
  FAIL("no seed split the points two and two");
}

TEST_CASE("site fraction and connectivity at n = 10000") {
  GenConfig cfg;
  cfg.n_locations = 10000;
  cfg.site_fraction = 0.25;
  cfg.seed = 1;
  const auto net = build_instance(cfg);
  CHECK(net.sites().size() == 2500);
  CHECK(net.edges().size() <= 29994);
  oracle::UnionFind uf(net.size());
  int merges = 0;
  for (const auto& e : net.edges()) merges += uf.unite(e.from, e.to);
  CHECK(merges == 9999);
}

TEST_CASE("at least one site") {
  GenConfig cfg;
  cfg.n_locations = 10;
  cfg.n_clusters = 2;
  cfg.site_fraction = 0.01;
  CHECK(build_instance(cfg).sites().size() == 1);
}
