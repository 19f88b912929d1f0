// Acceptance gate: one PASS/FAIL line per criterion. Run with criterion numbers
// as arguments (e.g. `acceptance 3 5`) to check a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cargo/bench.hpp"
#include "cargo/errors.hpp"
#include "cargo/events.hpp"
#include "cargo/partition.hpp"
#include "cargo/pipeline.hpp"
#include "cargo/plan_io.hpp"
#include "cargo/rng.hpp"
#include "cargo/synthgen.hpp"
#include "../unit/oracles.hpp"

using namespace cargo;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RoadNetwork clustered(int n, int clusters, std::uint64_t seed, std::vector<int>* truth = nullptr) {
  GenConfig cfg;
  cfg.n_locations = n;
  cfg.n_clusters = clusters;
  cfg.seed = seed;
  std::vector<int> scratch;
  return build_instance(cfg, truth ? *truth : scratch);
}

// Best agreement between two labelings over all label permutations (subset DP on the contingency table).
int best_matching(const std::vector<int>& a, const std::vector<int>& b, int k) {
  std::vector<std::vector<int>> table(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++table[a[i]][b[i]];
  std::vector<int> dp(1u << k, -1);
  dp[0] = 0;
  for (unsigned mask = 0; mask < dp.size(); ++mask) {
    if (dp[mask] < 0) continue;
    const int row = __builtin_popcount(mask);
    if (row == k) continue;
    for (int c = 0; c < k; ++c)
      if (!(mask & (1u << c))) dp[mask | (1u << c)] = std::max(dp[mask | (1u << c)], dp[mask] + table[row][c]);
  }
  return dp.back();
}

// 1. Partitioned travel distance within 5% of flat Tabu on n = 1000.
Verdict quality_trend() {
  Verdict v;
  double part = 0, flat = 0;
  PlanParams params;
  params.k_regions = 10;
  params.stop = StopRule::no_improvement_iterations(2000);
  for (int i = 0; i < 10; ++i) {
    const auto net = clustered(1000, 10, bench_instance_seed(1, 1000, i));
    params.seed = bench_solve_seed(bench_instance_seed(1, 1000, i));
    const auto p = run_pipeline(net, params);
    const auto f = run_flat(net, params);
    v.require(plan_violation(p, net.sites().size()).empty(), "partitioned coverage");
    v.require(plan_violation(f, net.sites().size()).empty(), "flat coverage");
    part += p.totals.distance_km / 10;
    flat += f.totals.distance_km / 10;
  }
  const double ratio = part / flat;
  v.require(ratio <= 1.05, "ratio above 1.05");
  v.detail = fmt("mean partitioned %.1f km, ", part) + fmt("flat %.1f km, ratio %.3f", flat, ratio) +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 2. Partitioned wall clock no slower than flat at n = 5000 under the same stop rule.
Verdict runtime_crossover() {
  Verdict v;
  const auto net = clustered(5000, 10, bench_instance_seed(2, 5000, 0));
  PlanParams params;
  params.k_regions = 10;
  params.seed = 2;
  params.stop = StopRule::no_improvement_iterations(2000);
  auto t0 = Clock::now();
  const auto p = run_pipeline(net, params);
  const double tp = seconds_since(t0);
  t0 = Clock::now();
  const auto f = run_flat(net, params);
  const double tf = seconds_since(t0);
  v.require(plan_violation(p, net.sites().size()).empty() && plan_violation(f, net.sites().size()).empty(), "coverage");
  v.require(tf / tp >= 1.0, "flat was faster");
  v.detail = fmt("partitioned %.1f s, ", tp) + fmt("flat %.1f s, speedup %.2f", tf, tf / tp) +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 3. Tabu within 5% (mean) and 15% (max) of the brute-force optimum on 8-customer tours.
Verdict tabu_gap() {
  Verdict v;
  double sum = 0, worst = 0;
  int optimal = 0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = oracle::random_instance(9, 1, derive_seed(3, static_cast<std::uint64_t>(i)));
    const double opt = oracle::brute_force_tour(inst);
    const auto r = solve(inst, StopRule::no_improvement_iterations(500), static_cast<std::uint64_t>(i));
    const double gap = r.best.cost / opt - 1;
    sum += gap;
    worst = std::max(worst, gap);
    optimal += gap <= 1e-9;
  }
  const double mean = sum / 100;
  v.require(mean <= 0.05, "mean gap above 5%");
  v.require(worst <= 0.15, "max gap above 15%");
  v.detail = fmt("mean gap %.2f%%, ", 100 * mean) + fmt("max gap %.2f%%, optimal in %.0f/100", 100 * worst, optimal) +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 4. Planted cluster recovery and the barbell minimum cut.
Verdict spectral_recovery() {
  Verdict v;
  double worst = 1, mean = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<int> truth;
    const auto net = clustered(1000, 10, 400 + seed, &truth);
    const auto g = build_abstract_graph(net, 10);
    const auto p = partition_graph(g, 10, seed);
    if (p.region_count() != 10) {
      v.require(false, "seed " + std::to_string(seed) + " gave " + std::to_string(p.region_count()) + " regions");
      continue;
    }
    std::vector<int> t(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) t[s] = truth[g.location(static_cast<SiteIndex>(s))];
    const double agree = best_matching(p.assignment, t, 10) / double(g.size());
    worst = std::min(worst, agree);
    mean += agree / 10;
  }
  v.require(worst >= 0.95, "agreement below 95%");

  // Two 5-cliques joined by one edge.
  std::vector<std::vector<AbstractEntry>> rows(10);
  auto link = [&](int a, int b) {
    rows[a].push_back({b, 1.0, 1.0});
    rows[b].push_back({a, 1.0, 1.0});
  };
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) {
      link(a, b);
      link(5 + a, 5 + b);
    }
  link(4, 5);
  std::vector<LocationId> ids(10);
  std::iota(ids.begin(), ids.end(), 0);
  const AbstractGraph bar(10, ids, std::vector<Point>(10), rows);
  const Eigen::MatrixXd qs = symmetrize(rate_matrix(bar));
  auto cut = [&](auto side) {
    double w = 0;
    for (int i = 0; i < 10; ++i)
      for (int j = i + 1; j < 10; ++j)
        if (side(i) != side(j)) w += qs(i, j);
    return w;
  };
  double best = 1e300;
  for (int mask = 1; mask < (1 << 9); ++mask) best = std::min(best, cut([&](int x) { return x < 9 && ((mask >> x) & 1); }));
  const auto p = partition_graph(bar, 2, 1);
  const double spectral = cut([&](int x) { return p.assignment[x]; });
  v.require(std::abs(spectral - best) <= 1e-12, "barbell cut differs from the minimum");
  v.detail = fmt("agreement min %.2f%%, ", 100 * worst) + fmt("mean %.2f%%; barbell cut %.3g", 100 * mean, spectral) +
             fmt(" vs enumerated %.3g", best) + (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 5. Laplacian and eigensolver identities; K = n abstraction against an independent shortest-path oracle.
Verdict numerical_invariants() {
  Verdict v;
  double worst_l1 = 0, worst_res = 0, lo = 1e300, hi = -1e300;
  for (auto [n, method] : {std::pair{1000, EigenOptions::Method::Dense}, std::pair{3000, EigenOptions::Method::Lanczos}}) {
    const auto g = build_abstract_graph(clustered(n, 10, 500 + n), 10);
    const auto l = laplacian(symmetrize(rate_matrix(g)));
    worst_l1 = std::max(worst_l1, (l.random_walk * Eigen::VectorXd::Ones(l.random_walk.rows())).cwiseAbs().maxCoeff());
    EigenOptions opt;
    opt.method = method;
    const auto emb = spectral_embed(l, 10, opt);
    for (int k = 0; k < emb.k; ++k) {
      const Eigen::VectorXd u = emb.sym_vectors.col(k);
      worst_res = std::max(worst_res, (l.symmetric * u - emb.eigenvalues[k] * u).norm());
      lo = std::min(lo, emb.eigenvalues[k]);
      hi = std::max(hi, emb.eigenvalues[k]);
    }
  }
  v.require(worst_l1 <= 1e-9, "L*1 not zero");
  v.require(worst_res <= 1e-8, "eigen residual too large");
  v.require(lo >= -1e-9 && hi <= 2 + 1e-9, "eigenvalue outside [0, 2]");

  std::size_t checked = 0, mismatched = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    GenConfig cfg;
    cfg.n_locations = 200;
    cfg.n_clusters = 3;
    cfg.site_fraction = 0.5;
    cfg.seed = 600 + seed;
    const auto net = build_instance(cfg);
    const auto g = build_abstract_graph(net, static_cast<int>(net.size()));
    for (SiteIndex i = 0; i < static_cast<SiteIndex>(g.size()); ++i) {
      const auto ref = oracle::array_dijkstra(net, g.location(i));
      std::size_t reachable = 0;
      for (SiteIndex j = 0; j < static_cast<SiteIndex>(g.size()); ++j)
        if (j != i && ref[g.location(j)].time < oracle::kInf) ++reachable;
      if (g.row(i).size() != reachable) ++mismatched;
      for (const auto& e : g.row(i)) {
        ++checked;
        const auto& r = ref[g.location(e.site)];
        if (e.time_h != r.time || e.dist_km != r.dist) ++mismatched;
      }
    }
  }
  v.require(mismatched == 0, std::to_string(mismatched) + " abstract entries differ from the oracle");
  v.detail = fmt("max |L1| %.2e, ", worst_l1) + fmt("max residual %.2e, ", worst_res) +
             fmt("eigenvalues in [%.2e, %.4f], ", lo, hi) + std::to_string(checked) + " K=n entries exact" +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 6. new_parcel on a 50-100 site region under the default event stop rule.
Verdict event_latency() {
  Verdict v;
  GraphState state;
  state.network = clustered(1000, 10, 66);
  PlanParams params;
  params.k_regions = 10;
  params.seed = 6;
  params.stop = StopRule::no_improvement_iterations(2000);
  auto plan = run_pipeline(state.network, params, &state.graph);
  const RegionPlan* target = nullptr;
  for (const auto& r : plan.regions)
    if (r.instance.size() >= 50 && r.instance.size() <= 100 && (!target || r.instance.size() > target->instance.size()))
      target = &r;
  if (!target) {
    v.require(false, "no region with 50-100 sites");
    return v;
  }
  const int region = target->id;
  const int size = target->instance.size();
  // Drop the parcel on the region's own depot so the nearest-depot rule picks this region.
  const auto at = state.network.location(target->locations[target->instance.depot]).point();
  const auto out = handle_event(plan, state, NewParcel{{at.x + 0.01, at.y + 0.01}}, default_event_stop());
  v.require(out.touched_regions == std::vector<int>{region}, "parcel went to another region");
  v.require(out.seconds <= 30.0, "slower than 30 s");
  v.require(plan_violation(plan, state.graph.size()).empty(), "coverage broken");
  v.detail = "region of " + std::to_string(size) + " sites, " + fmt("handled in %.1f s", out.seconds) +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 7. Byte-identical plans and benchmark rows across runs.
Verdict determinism() {
  Verdict v;
  const auto net = clustered(1000, 10, 77);
  PlanParams params;
  params.k_regions = 10;
  params.seed = 7;
  params.stop = StopRule::no_improvement_iterations(500);
  const PlanFormat no_time{false, 2};
  v.require(plan_to_json(run_pipeline(net, params), no_time) == plan_to_json(run_pipeline(net, params), no_time),
            "pipeline plans differ");
  params.jobs = 4;
  v.require(plan_to_json(run_pipeline(net, params), no_time) == plan_to_json(run_pipeline(net, params), no_time),
            "threaded pipeline plans differ");
  v.require(plan_to_json(run_flat(net, params), no_time) == plan_to_json(run_flat(net, params), no_time),
            "flat plans differ");

  BenchConfig cfg;
  cfg.sizes = {300, 500};
  cfg.trials = 2;
  cfg.seed = 7;
  cfg.jobs = 2;
  cfg.plan.stop = StopRule::no_improvement_iterations(300);
  const auto a = run_bench(cfg), b = run_bench(cfg);
  for (auto f : {ReportFormat::Json, ReportFormat::Csv})
    v.require(format_report(a, f, false) == format_report(b, f, false), "benchmark rows differ");
  v.detail = std::string("pipeline, threaded pipeline, flat and bench outputs identical") +
             (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

// 8. Property suites: coverage across random events, exact incremental costs, sampling law.
Verdict properties() {
  Verdict v;
  GraphState state;
  GenConfig gen;
  gen.n_locations = 250;
  gen.n_clusters = 3;
  gen.site_fraction = 0.6;
  gen.seed = 88;
  state.network = build_instance(gen);
  PlanParams params;
  params.k_regions = 3;
  params.seed = 8;
  params.customers_per_vehicle = 8;
  params.stop = StopRule::no_improvement_iterations(100);
  auto plan = run_pipeline(state.network, params, &state.graph);
  const auto stop = StopRule::no_improvement_iterations(20);

  Rng rng(derive_seed(8, stream_id("acceptance/events")));
  std::map<std::string, int> applied, rejected;
  int broken = 0;
  for (int step = 0; step < 1000; ++step) {
    AdHocEvent ev;
    const auto pick = rng.below(3);
    if (pick == 0) {
      ev = NewParcel{{rng.uniform(-5, gen.bbox_km + 5), rng.uniform(-5, gen.bbox_km + 5)}};
    } else if (pick == 1) {
      const auto& r = plan.regions[rng.below(plan.regions.size())];
      const bool real = rng.uniform() < 0.9;
      ev = VehicleBreakdown{r.id, real ? r.vehicle_ids[rng.below(r.vehicle_ids.size())] : 1000};
    } else {
      const auto& e = state.network.edges()[rng.below(state.network.edges().size())];
      ev = BorderClosed{{{e.from, e.to}}};
    }
    try {
      handle_event(plan, state, ev, stop);
      ++applied[event_kind(ev)];
    } catch (const std::exception&) {
      ++rejected[event_kind(ev)];
    }
    if (!plan_violation(plan, state.graph.size()).empty()) ++broken;
    for (const auto& r : plan.regions)
      if (std::abs(r.solution.cost - solution_cost(r.instance, r.solution)) > 1e-9) ++broken;
  }
  v.require(broken == 0, std::to_string(broken) + " steps broke coverage or cost");

  double worst_drift = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = oracle::random_instance(120, 4, 800 + seed);
    TabuSearch search(inst, initial_solution(inst), {}, seed);
    for (int it = 0; it < 5000; ++it) {
      search.step();
      worst_drift = std::max(worst_drift, std::abs(search.current().cost - solution_cost(inst, search.current())));
    }
  }
  v.require(worst_drift <= 1e-9, "incremental cost drifted");

  // Customer 1 opens the only route, so its targets are exactly customers 2, 3, 4 at 1, 2 and 4 km.
  VrpInstance inst;
  inst.coords = {{0, 50}, {0, 0}, {1, 0}, {-2, 0}, {0, 4}};
  auto m = std::make_shared<CostMatrix>(inst.coords.size());
  for (std::size_t i = 0; i < inst.coords.size(); ++i) {
    inst.members.push_back(static_cast<SiteIndex>(i));
    for (std::size_t j = 0; j < inst.coords.size(); ++j) {
      const double d = euclidean(inst.coords[i], inst.coords[j]);
      m->set(i, j, d, d);
    }
  }
  inst.costs = m;
  TabuSearch search(inst, Solution{{{1, 2, 3, 4}}, 0}, {1, 1, 1e-6}, 8);
  std::map<int, int> hits;
  int total = 0;
  while (total < 100000) {
    const auto mv = search.candidate_moves()[0];
    if (mv.customer != 1) continue;
    ++hits[mv.after];
    ++total;
  }
  const double expected[3] = {4.0 / 7, 2.0 / 7, 1.0 / 7};
  double worst_freq = 0;
  for (int t = 0; t < 3; ++t) worst_freq = std::max(worst_freq, std::abs(hits[2 + t] / double(total) - expected[t]));
  v.require(worst_freq <= 0.02, "sampling frequencies off");

  std::string counts;
  for (const auto& [k, n] : applied) counts += k + " " + std::to_string(n) + "/" + std::to_string(n + rejected[k]) + " ";
  v.detail = "1000 events (applied/tried: " + counts + "), " + fmt("cost drift %.1e, ", worst_drift) +
             fmt("sampling error %.4f", worst_freq) + (v.detail.empty() ? "" : " [" + v.detail + "]");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"quality trend, n=1000 k=10: partitioned distance <= 1.05 x flat", quality_trend},
      {"runtime crossover, n=5000: partitioned wall clock <= flat", runtime_crossover},
      {"tabu gap to brute force, 8 customers: mean <= 5%, max <= 15%", tabu_gap},
      {"spectral recovery >= 95% on planted clusters; barbell minimum cut", spectral_recovery},
      {"numerical invariants: L*1, residuals, spectrum range, K=n oracle", numerical_invariants},
      {"event latency: new parcel on a 50-100 site region within 30 s", event_latency},
      {"determinism: byte-identical plans and bench rows", determinism},
      {"property suites: event coverage, cost bookkeeping, sampling law", properties},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failed += !v.pass;
    std::printf("%s criterion %d: %s -- %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
