#include <doctest.h>

#include <map>
#include <set>

#include "cargo/vrp.hpp"
#include "oracles.hpp"

using namespace cargo;

namespace {

VrpInstance line_instance(const std::vector<double>& xs, int vehicles = 1) {
  VrpInstance inst;
  auto m = std::make_shared<CostMatrix>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    inst.members.push_back(static_cast<SiteIndex>(i));
    inst.coords.push_back({xs[i], 0.0});
    for (std::size_t j = 0; j < xs.size(); ++j) m->set(i, j, std::abs(xs[i] - xs[j]) / 50, std::abs(xs[i] - xs[j]));
  }
  inst.costs = m;
  inst.n_vehicles = vehicles;
  return inst;
}

}  // namespace

TEST_CASE("instance checks and fleet size") {
  auto inst = oracle::random_instance(5, 1, 1);
  CHECK_NOTHROW(check_instance(inst));
  inst.depot = 9;
  CHECK_THROWS_AS(check_instance(inst), std::invalid_argument);
  inst.depot = 0;
  inst.n_vehicles = 0;
  CHECK_THROWS_AS(check_instance(inst), std::invalid_argument);
  CHECK(default_vehicle_count(0) == 1);
  CHECK(default_vehicle_count(50) == 1);
  CHECK(default_vehicle_count(51) == 2);
  CHECK(default_vehicle_count(7, 3) == 3);
  CHECK(tabu_tenure(1) == 1);
  CHECK(tabu_tenure(20) == 1);
  CHECK(tabu_tenure(21) == 2);
  CHECK(tabu_tenure(999) == 50);
}

TEST_CASE("cheapest insertion basics") {
  const auto one = line_instance({0, 3});
  const auto s1 = initial_solution(one);
  CHECK(s1.routes == std::vector<std::vector<int>>{{1}});
  CHECK(s1.cost == 6.0);

  // Customers listed out of line order still come out in line order.
  const auto line = line_instance({0, 2, 3, 1});
  const auto s = initial_solution(line);
  CHECK(s.cost == doctest::Approx(oracle::brute_force_tour(line)));
  CHECK(s.cost == doctest::Approx(6.0));
  const auto& r = s.routes[0];
  CHECK((r == std::vector<int>{3, 1, 2} || r == std::vector<int>{2, 1, 3}));
}

TEST_CASE("cheapest insertion covers every customer exactly once") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::random_instance(2 + static_cast<int>(seed % 40), 1 + static_cast<int>(seed % 4), seed);
    const auto s = initial_solution(inst);
    CHECK(coverage_violation(inst, s).empty());
    CHECK(s.routes.size() == static_cast<std::size_t>(inst.n_vehicles));
    CHECK(s.cost == doctest::Approx(solution_cost(inst, s)).epsilon(1e-12));
  }
}

TEST_CASE("coverage violations are reported") {
  const auto inst = oracle::random_instance(4, 2, 3);
  CHECK(!coverage_violation(inst, Solution{{{1, 2}, {}}, 0}).empty());
  CHECK(!coverage_violation(inst, Solution{{{1, 2}, {3, 1}}, 0}).empty());
  CHECK(!coverage_violation(inst, Solution{{{0, 1, 2, 3}, {}}, 0}).empty());
  CHECK(coverage_violation(inst, Solution{{{3}, {1, 2}}, 0}).empty());
}

TEST_CASE("route cost and totals") {
  const auto inst = line_instance({0, 1, 4});
  const Solution s{{{1, 2}}, 0};
  CHECK(route_cost(inst, s.routes[0]) == 8.0);
  const auto t = solution_totals(inst, s);
  CHECK(t.distance_km == 8.0);
  CHECK(t.time_h == doctest::Approx(8.0 / 50));
}

TEST_CASE("weighted sampling follows the inverse-distance law") {
  Rng rng(123);
  const std::vector<double> w{1.0, 0.5, 0.25};
  std::vector<int> first(3, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++first[weighted_sample(w, 1, rng)[0]];
  CHECK(std::abs(first[0] / double(draws) - 4.0 / 7) < 0.02);
  CHECK(std::abs(first[1] / double(draws) - 2.0 / 7) < 0.02);
  CHECK(std::abs(first[2] / double(draws) - 1.0 / 7) < 0.02);

  const auto all = weighted_sample(w, 10, rng);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 3);
}

TEST_CASE("candidate targets are drawn with probability proportional to 1/distance") {
  // Route [i, a, b, c]; i is first so its own depot slot is a no-op and never offered.
  VrpInstance inst;
  const std::vector<Point> pts{{0, 50}, {0, 0}, {1, 0}, {-2, 0}, {0, 4}};
  auto m = std::make_shared<CostMatrix>(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    inst.members.push_back(static_cast<SiteIndex>(i));
    for (std::size_t j = 0; j < pts.size(); ++j) m->set(i, j, euclidean(pts[i], pts[j]), euclidean(pts[i], pts[j]));
  }
  inst.coords = pts;
  inst.costs = m;
  TabuParams params;
  params.m_nodes = 1;
  params.s_targets = 1;
  TabuSearch search(inst, Solution{{{1, 2, 3, 4}}, 0}, params, 99);
  std::map<int, int> hits;
  int total = 0;
  while (total < 100000) {
    const auto moves = search.candidate_moves();
    REQUIRE(moves.size() == 1);
    if (moves[0].customer != 1) continue;
    ++hits[moves[0].after];
    ++total;
  }
  CHECK(hits.size() == 3);
  CHECK(std::abs(hits[2] / double(total) - 4.0 / 7) < 0.02);
  CHECK(std::abs(hits[3] / double(total) - 2.0 / 7) < 0.02);
  CHECK(std::abs(hits[4] / double(total) - 1.0 / 7) < 0.02);
}

TEST_CASE("two customers: the sample space is exhausted") {
  const auto inst = line_instance({0, 1, 2});
  TabuSearch search(inst, Solution{{{1, 2}}, 0}, {}, 5);
  std::set<std::pair<int, int>> got;
  for (const auto& m : search.candidate_moves()) got.insert({m.customer, m.after});
  CHECK(got == std::set<std::pair<int, int>>{{1, 2}, {2, kDepotSlot}});
}

TEST_CASE("move deltas match recomputation from scratch") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = oracle::random_instance(12 + static_cast<int>(seed), 3, seed);
    TabuSearch search(inst, initial_solution(inst), {}, seed);
    for (int step = 0; step < 20; ++step) {
      for (const auto& m : search.candidate_moves()) {
        CHECK(m.delta == doctest::Approx(search.move_delta(m.customer, m.route, m.after)));
        TabuSearch probe = search;
        probe.apply(m);
        CHECK(coverage_violation(inst, probe.current()).empty());
        const double fresh = solution_cost(inst, probe.current());
        CHECK(std::abs(fresh - (search.current().cost + m.delta)) <= 1e-9);
        CHECK(std::abs(fresh - probe.current().cost) <= 1e-9);
      }
      search.step();
    }
  }
}

TEST_CASE("first step takes the cheapest candidate") {
  const auto inst = oracle::random_instance(30, 2, 8);
  TabuSearch a(inst, initial_solution(inst), {}, 4), b(inst, initial_solution(inst), {}, 4);
  const auto moves = a.candidate_moves();
  double best = 1e300;
  for (const auto& m : moves) best = std::min(best, m.delta);
  b.step();
  REQUIRE(b.last_move().has_value());
  CHECK(b.last_move()->delta == best);
}

TEST_CASE("tabu trace: tenure respected unless aspiration, best monotone, bookkeeping exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = oracle::random_instance(60, 3, 100 + seed);
    TabuParams params;
    params.m_nodes = 3;
    params.s_targets = 3;
    TabuSearch search(inst, initial_solution(inst), params, seed);
    CHECK(search.tenure() == 3);
    std::map<int, long> last_moved;
    double best = search.best().cost;
    for (int it = 0; it < 3000; ++it) {
      search.step();
      const long t = search.iteration();
      if (const auto& m = search.last_move()) {
        if (auto f = last_moved.find(m->customer); f != last_moved.end() && t <= f->second + search.tenure())
          CHECK(search.last_was_aspiration());
        last_moved[m->customer] = t;
        CHECK(search.tabu_until(m->customer) == t + search.tenure());
      }
      CHECK(search.best().cost <= best);
      best = search.best().cost;
      CHECK(std::abs(search.current().cost - solution_cost(inst, search.current())) <= 1e-9);
      CHECK(coverage_violation(inst, search.current()).empty());
    }
  }
}

TEST_CASE("solve: trivial, deterministic, never worse than construction") {
  const auto one = line_instance({0, 5});
  const auto r1 = solve(one, StopRule::no_improvement_iterations(100), 1);
  CHECK(r1.best.cost == 10.0);
  CHECK(r1.iterations == 0);

  const auto inst = oracle::random_instance(80, 3, 77);
  const auto stop = StopRule::no_improvement_iterations(300);
  const auto a = solve(inst, stop, 9), b = solve(inst, stop, 9);
  CHECK(a.best == b.best);
  CHECK(a.iterations == b.iterations);
  CHECK(a.best.cost <= a.initial_cost);
  CHECK(a.best.cost == doctest::Approx(solution_cost(inst, a.best)).epsilon(1e-12));
  CHECK(coverage_violation(inst, a.best).empty());

  const auto timed = solve(inst, StopRule::wall_clock(0.05), 9);
  CHECK(timed.wall_seconds >= 0.05);
  CHECK(coverage_violation(inst, timed.best).empty());
}

TEST_CASE("8 customers, one vehicle: close to the brute-force optimum") {
  double gap_sum = 0;
  int optimal = 0;
  const int runs = 20;
  for (int k = 0; k < runs; ++k) {
    const auto inst = oracle::random_instance(9, 1, 500 + k);
    const double opt = oracle::brute_force_tour(inst);
    const auto r = solve(inst, StopRule::no_improvement_iterations(500), k);
    CHECK(r.best.cost >= opt - 1e-9);
    gap_sum += r.best.cost / opt - 1;
    optimal += r.best.cost <= opt + 1e-9;
  }
  CHECK(gap_sum / runs <= 0.05);
  CHECK(optimal * 2 > runs);
}

TEST_CASE("solution text") {
  const auto inst = line_instance({0, 1, 2});
  const Solution s{{{1, 2}, {}}, 4};
  const std::vector<int> ids{7, 8};
  CHECK(serialize_solution(inst, s, ids) == "D 0\nV 7 1 2\nV 8\nS 4\n");
  CHECK(StopRule::no_improvement_iterations(5).describe() == "no improvement for 5 iterations");
  CHECK(to_string(Objective::Time) == "time");
}
