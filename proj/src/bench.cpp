#include "cargo/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cargo/parallel.hpp"
#include "cargo/plan_io.hpp"
#include "cargo/rng.hpp"

namespace cargo {

namespace {

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; zero for a single value.
Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

BenchRow row_from(const DistributionPlan& plan, int size, int trial, std::uint64_t iseed, std::uint64_t sseed) {
  BenchRow r;
  r.size = size;
  r.trial = trial;
  r.method = plan.method;
  r.instance_seed = iseed;
  r.solve_seed = sseed;
  r.regions = static_cast<int>(plan.regions.size());
  r.distance_km = plan.totals.distance_km;
  r.time_h = plan.totals.time_h;
  r.cost = plan.cost;
  for (const auto& [stage, s] : plan.timings) r.wall_seconds += s;
  return r;
}

std::string num(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

std::uint64_t bench_instance_seed(std::uint64_t root, int size, int trial) {
  const auto per_size = derive_seed(derive_seed(root, stream_id("bench/instance")), static_cast<std::uint64_t>(size));
  return derive_seed(per_size, static_cast<std::uint64_t>(trial));
}

std::uint64_t bench_solve_seed(std::uint64_t instance_seed) { return derive_seed(instance_seed, stream_id("bench/solve")); }

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  if (cfg.sizes.empty()) throw std::invalid_argument("bench: no sizes given");
  for (int n : cfg.sizes)
    if (n < 2) throw std::invalid_argument("bench: size " + std::to_string(n) + " is too small");

  BenchReport report;
  report.config = cfg;
  const auto n_tasks = cfg.sizes.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<BenchRow> flat(n_tasks), part(n_tasks);

  parallel_for(n_tasks, cfg.jobs, [&](std::size_t task) {
    const int size = cfg.sizes[task / static_cast<std::size_t>(cfg.trials)];
    const int trial = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
    const auto iseed = bench_instance_seed(cfg.seed, size, trial);
    const auto sseed = bench_solve_seed(iseed);
    for (auto* row : {&part[task], &flat[task]}) {
      row->size = size;
      row->trial = trial;
      row->instance_seed = iseed;
      row->solve_seed = sseed;
    }
    part[task].method = "partitioned";
    flat[task].method = "flat";

    GenConfig gen = cfg.gen;
    gen.n_locations = size;
    gen.seed = iseed;
    PlanParams params = cfg.plan;
    params.seed = sseed;
    params.jobs = 1;
    if (params.k_regions <= 0) params.k_regions = gen.n_clusters;

    RoadNetwork net;
    try {
      net = build_instance(gen);
    } catch (const std::exception& e) {
      part[task].error = flat[task].error = std::string("generate: ") + e.what();
      return;
    }
    const std::string stem = cfg.plan_dir + "/n" + std::to_string(size) + "_t" + std::to_string(trial);
    auto run = [&](BenchRow& row, auto&& method) {
      try {
        const auto plan = method(net, params);
        row = row_from(plan, size, trial, iseed, sseed);
        if (!cfg.plan_dir.empty()) write_file(stem + "_" + plan.method + ".json", plan_to_json(plan));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    };
    run(part[task], [](const RoadNetwork& n, const PlanParams& p) { return run_pipeline(n, p); });
    run(flat[task], [](const RoadNetwork& n, const PlanParams& p) { return run_flat(n, p); });
  });

  for (std::size_t t = 0; t < n_tasks; ++t) {
    report.rows.push_back(part[t]);
    report.rows.push_back(flat[t]);
  }
  for (const auto& r : report.rows)
    if (!r.error.empty())
      std::cerr << "warning: n=" << r.size << " trial " << r.trial << " " << r.method << " failed: " << r.error
                << '\n';

  for (int size : cfg.sizes) {
    for (const char* method : {"partitioned", "flat"}) {
      BenchAggregate a;
      a.size = size;
      a.method = method;
      std::vector<double> dist, wall;
      for (const auto& r : report.rows) {
        if (r.size != size || r.method != method) continue;
        ++a.trials;
        if (!r.error.empty()) continue;
        ++a.completed;
        dist.push_back(r.distance_km);
        wall.push_back(r.wall_seconds);
      }
      const auto d = stats(dist), w = stats(wall);
      a.mean_distance_km = d.mean;
      a.std_distance_km = d.std;
      a.mean_wall_seconds = w.mean;
      a.std_wall_seconds = w.std;
      report.aggregates.push_back(a);
    }
  }
  return report;
}

std::string format_report(const BenchReport& report, ReportFormat format, bool timings) {
  std::ostringstream out;
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json doc;
    const auto& c = report.config;
    doc["config"] = {{"seed", c.seed},
                     {"sizes", c.sizes},
                     {"trials", c.trials},
                     {"clusters", c.gen.n_clusters},
                     {"sigma_km", c.gen.cluster_sigma_km},
                     {"bbox_km", c.gen.bbox_km},
                     {"site_fraction", c.gen.site_fraction},
                     {"k_regions", c.plan.k_regions},
                     {"knn", c.plan.knn},
                     {"customers_per_vehicle", c.plan.customers_per_vehicle},
                     {"stop", c.plan.stop.describe()}};
    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
      nlohmann::ordered_json j = {{"size", r.size},
                                  {"trial", r.trial},
                                  {"method", r.method},
                                  {"instance_seed", r.instance_seed},
                                  {"solve_seed", r.solve_seed},
                                  {"regions", r.regions},
                                  {"distance_km", r.distance_km},
                                  {"time_h", r.time_h},
                                  {"cost", r.cost}};
      if (timings) j["wall_seconds"] = r.wall_seconds;
      if (!r.error.empty()) j["error"] = r.error;
      rows.push_back(std::move(j));
    }
    auto& aggs = doc["aggregates"] = nlohmann::ordered_json::array();
    for (const auto& a : report.aggregates) {
      nlohmann::ordered_json j = {{"size", a.size},
                                  {"method", a.method},
                                  {"trials", a.trials},
                                  {"completed", a.completed},
                                  {"incomplete", a.incomplete()},
                                  {"mean_distance_km", a.mean_distance_km},
                                  {"std_distance_km", a.std_distance_km}};
      if (timings) {
        j["mean_wall_seconds"] = a.mean_wall_seconds;
        j["std_wall_seconds"] = a.std_wall_seconds;
      }
      aggs.push_back(std::move(j));
    }
    out << doc.dump(2) << '\n';
  } else if (format == ReportFormat::Csv) {
    out << "kind,size,trial,method,instance_seed,solve_seed,regions,distance_km,std_distance_km,time_h,cost,completed";
    if (timings) out << ",wall_seconds,std_wall_seconds";
    out << ",error\n";
    for (const auto& r : report.rows) {
      out << "trial," << r.size << ',' << r.trial << ',' << r.method << ',' << r.instance_seed << ',' << r.solve_seed
          << ',' << r.regions << ',' << format_double(r.distance_km) << ",," << format_double(r.time_h) << ','
          << format_double(r.cost) << ',' << (r.error.empty() ? 1 : 0);
      if (timings) out << ',' << format_double(r.wall_seconds) << ',';
      out << ',' << (r.error.empty() ? "" : "\"" + r.error + "\"") << '\n';
    }
    for (const auto& a : report.aggregates) {
      out << "mean," << a.size << ",," << a.method << ",,,," << format_double(a.mean_distance_km) << ','
          << format_double(a.std_distance_km) << ",,," << a.completed << '/' << a.trials;
      if (timings) out << ',' << format_double(a.mean_wall_seconds) << ',' << format_double(a.std_wall_seconds);
      out << ',' << (a.incomplete() ? "incomplete" : "") << '\n';
    }
  } else {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %-12s %-8s %-22s %s\n", "Size", "Method", "Trials", "Travel distance [km]",
                  timings ? "Running time [s]" : "");
    out << line;
    for (const auto& a : report.aggregates) {
      const std::string trials = std::to_string(a.completed) + "/" + std::to_string(a.trials) + (a.incomplete() ? "!" : "");
      const std::string dist = num(a.mean_distance_km, 1) + " +- " + num(a.std_distance_km, 1);
      const std::string wall = timings ? num(a.mean_wall_seconds, 2) + " +- " + num(a.std_wall_seconds, 2) : "";
      std::snprintf(line, sizeof line, "%-8d %-12s %-8s %-22s %s\n", a.size, a.method.c_str(), trials.c_str(),
                    dist.c_str(), wall.c_str());
      out << line;
    }
  }
  return out.str();
}

}  // namespace cargo
