// cargoplan: generate instances, build regional distribution plans, replay events, benchmark.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cargo/bench.hpp"
#include "cargo/errors.hpp"
#include "cargo/events.hpp"
#include "cargo/netmodel.hpp"
#include "cargo/pipeline.hpp"
#include "cargo/plan_io.hpp"
#include "cargo/synthgen.hpp"

namespace {

using namespace cargo;

struct StopFlags {
  std::optional<double> seconds;
  std::optional<long> iterations;

  void add(CLI::App* cmd, const std::string& prefix, const std::string& what) {
    auto* s = cmd->add_option("--" + prefix + "stop-seconds", seconds, "stop after this many seconds without improvement" + what)
                  ->check(CLI::PositiveNumber);
    auto* i = cmd->add_option("--" + prefix + "stop-iters", iterations, "stop after this many iterations without improvement" + what)
                  ->check(CLI::PositiveNumber);
    s->excludes(i);
  }
  StopRule rule(StopRule fallback) const {
    if (seconds) return StopRule::wall_clock(*seconds);
    if (iterations) return StopRule::no_improvement_iterations(*iterations);
    return fallback;
  }
};

struct PlanFlags {
  PlanParams params;
  StopFlags stop;
  std::string objective = "distance";
  std::string out;
  std::string geojson;
  bool no_timings = false;

  void add(CLI::App* cmd, bool with_regions) {
    if (with_regions) {
      cmd->add_option("--k-regions", params.k_regions, "number of regions (0 = round(sqrt(sites/100)))")
          ->check(CLI::NonNegativeNumber);
    }
    cmd->add_option("--knn", params.knn, "nearest sites kept per abstract-graph row")->check(CLI::PositiveNumber);
    cmd->add_option("--vehicles-per", params.customers_per_vehicle, "customers per vehicle when sizing fleets")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--m-nodes", params.tabu.m_nodes, "customers sampled per Tabu iteration")->check(CLI::PositiveNumber);
    cmd->add_option("--s-targets", params.tabu.s_targets, "targets sampled per customer")->check(CLI::PositiveNumber);
    cmd->add_option("--objective", objective, "routing objective")->check(CLI::IsMember({"distance", "time"}));
    cmd->add_option("--seed", params.seed, "root seed");
    cmd->add_option("--jobs", params.jobs, "worker threads")->check(CLI::PositiveNumber);
    stop.add(cmd, "", " (default 10 s)");
  }
  PlanParams resolve() const {
    PlanParams p = params;
    p.stop = stop.rule(StopRule::wall_clock(10.0));
    p.objective = objective == "time" ? Objective::Time : Objective::Distance;
    return p;
  }
  void add_outputs(CLI::App* cmd) {
    cmd->add_option("--out", out, "plan JSON path (default stdout)");
    cmd->add_option("--geojson", geojson, "also write routes and regions as GeoJSON");
    cmd->add_flag("--no-timings", no_timings, "leave wall-clock fields out of the plan");
  }
};

RoadNetwork load_instance(const std::string& path) {
  try {
    return load_network(path);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

void write_plan(const DistributionPlan& plan, const PlanFlags& f) {
  emit(f.out, plan_to_json(plan, {!f.no_timings, 2}));
  if (!f.geojson.empty()) write_file(f.geojson, plan_to_geojson(plan));
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v < 2) throw CLI::ValidationError("--sizes", "bad size '" + item + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void add_generator_flags(CLI::App* cmd, GenConfig& gen, bool with_n) {
  if (with_n) cmd->add_option("--n", gen.n_locations, "number of road locations")->check(CLI::Range(2, 10000000));
  cmd->add_option("--clusters", gen.n_clusters, "number of city clusters")->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", gen.cluster_sigma_km, "cluster standard deviation in km")->check(CLI::PositiveNumber);
  cmd->add_option("--bbox", gen.bbox_km, "side of the square holding cluster centres, km")->check(CLI::PositiveNumber);
  cmd->add_option("--site-fraction", gen.site_fraction, "fraction of locations that are delivery sites")
      ->check(CLI::Range(0.0, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-first, route-second cargo distribution planning"};
  app.require_subcommand(1);

  // generate
  GenConfig gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a synthetic clustered road network");
  add_generator_flags(generate, gen, true);
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen_out, "instance path (default stdout)");

  // pipeline / flat
  std::string instance;
  PlanFlags pipe_flags, flat_flags;
  auto* pipeline = app.add_subcommand("pipeline", "abstract, partition and route each region");
  pipeline->add_option("instance", instance, "road network file")->required();
  pipe_flags.add(pipeline, true);
  pipe_flags.add_outputs(pipeline);

  auto* flat = app.add_subcommand("flat", "route every site as one problem (baseline)");
  flat->add_option("instance", instance, "road network file")->required();
  flat_flags.add(flat, false);
  flat_flags.add_outputs(flat);

  // event
  PlanFlags event_flags;
  StopFlags event_stop;
  std::string events_file;
  std::vector<std::string> inline_events;
  auto* event = app.add_subcommand("event", "build a plan, then replay ad-hoc events against it");
  event->add_option("instance", instance, "road network file")->required();
  event_flags.add(event, true);
  event_flags.add_outputs(event);
  event_stop.add(event, "event-", " while handling an event (default 20 s)");
  auto* ev_file = event->add_option("--events", events_file, "file with one JSON event per line");
  auto* ev_inline = event->add_option("--event", inline_events, "one JSON event; repeatable, applied in order");
  ev_file->excludes(ev_inline);

  // bench
  BenchConfig bench_cfg;
  std::string sizes = "200";
  StopFlags bench_stop;
  std::string bench_out, format = "table";
  bool bench_no_timings = false;
  auto* bench = app.add_subcommand("bench", "compare partitioned and flat planning over generated instances");
  bench->add_option("--sizes", sizes, "comma-separated instance sizes");
  bench->add_option("--trials", bench_cfg.trials, "instances per size")->check(CLI::PositiveNumber);
  add_generator_flags(bench, bench_cfg.gen, false);
  bench->add_option("--k-regions", bench_cfg.plan.k_regions, "regions (0 = one per cluster)")->check(CLI::NonNegativeNumber);
  bench->add_option("--knn", bench_cfg.plan.knn, "nearest sites kept per abstract-graph row")->check(CLI::PositiveNumber);
  bench->add_option("--vehicles-per", bench_cfg.plan.customers_per_vehicle, "customers per vehicle")
      ->check(CLI::PositiveNumber);
  bench_stop.add(bench, "", " (default 2000 iterations)");
  bench->add_option("--seed", bench_cfg.seed, "root seed");
  bench->add_option("--jobs", bench_cfg.jobs, "trials run concurrently")->check(CLI::PositiveNumber);
  bench->add_option("--format", format, "report format")->check(CLI::IsMember({"table", "json", "csv"}));
  bench->add_option("--out", bench_out, "report path (default stdout)");
  bench->add_option("--plans-dir", bench_cfg.plan_dir, "write every trial's plan JSON into this directory");
  bench->add_flag("--no-timings", bench_no_timings, "leave wall-clock columns out");

  try {
    app.parse(argc, argv);
    if (bench->parsed()) bench_cfg.sizes = parse_sizes(sizes);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) {
      emit(gen_out, serialize_network(build_instance(gen)));
    } else if (pipeline->parsed()) {
      const auto net = load_instance(instance);
      write_plan(run_pipeline(net, pipe_flags.resolve()), pipe_flags);
    } else if (flat->parsed()) {
      const auto net = load_instance(instance);
      write_plan(run_flat(net, flat_flags.resolve()), flat_flags);
    } else if (event->parsed()) {
      std::vector<AdHocEvent> events;
      if (!events_file.empty()) {
        try {
          events = parse_events(read_file(events_file));
        } catch (const std::exception& e) {
          throw std::runtime_error(events_file + ": " + e.what());
        }
      }
      for (const auto& text : inline_events) {
        try {
          events.push_back(parse_event(text));
        } catch (const std::exception& e) {
          throw std::runtime_error("--event '" + text + "': " + e.what());
        }
      }
      GraphState state;
      state.network = load_instance(instance);
      auto plan = run_pipeline(state.network, event_flags.resolve(), &state.graph);
      const auto stop = event_stop.rule(default_event_stop());
      for (std::size_t i = 0; i < events.size(); ++i) {
        try {
          const auto outcome = handle_event(plan, state, events[i], stop);
          std::cerr << "event " << i << " " << event_kind(events[i]) << ": regions";
          for (int r : outcome.touched_regions) std::cerr << ' ' << r;
          std::cerr << " in " << outcome.seconds << " s\n";
        } catch (const std::exception& e) {
          throw StageError("event " + std::to_string(i) + " (" + event_kind(events[i]) + ")", e.what());
        }
      }
      write_plan(plan, event_flags);
    } else if (bench->parsed()) {
      bench_cfg.plan.stop = bench_stop.rule(StopRule::no_improvement_iterations(2000));
      const auto fmt = format == "json" ? ReportFormat::Json : format == "csv" ? ReportFormat::Csv : ReportFormat::Table;
      emit(bench_out, format_report(run_bench(bench_cfg), fmt, !bench_no_timings));
    }
  } catch (const std::exception& e) {
    std::cerr << "cargoplan: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
