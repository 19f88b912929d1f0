#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cargo/pipeline.hpp"
#include "cargo/synthgen.hpp"

namespace cargo {

struct BenchConfig {
  std::vector<int> sizes{200};
  int trials = 10;
  GenConfig gen;       // n_locations and seed are set per trial
  PlanParams plan;     // k_regions 0 means one region per generated cluster
  std::uint64_t seed = 0;
  int jobs = 1;        // trials run concurrently; each solve is single-threaded
  std::string plan_dir;  // when set, every trial's plans are written here
};

/// Instance seed of (size, trial) and the solver seed used by both methods on it.
std::uint64_t bench_instance_seed(std::uint64_t root, int size, int trial);
std::uint64_t bench_solve_seed(std::uint64_t instance_seed);

struct BenchRow {
  int size = 0;
  int trial = 0;
  std::string method;
  std::uint64_t instance_seed = 0;
  std::uint64_t solve_seed = 0;
  int regions = 0;
  double distance_km = 0.0;
  double time_h = 0.0;
  double cost = 0.0;
  double wall_seconds = 0.0;
  std::string error;  // non-empty when the trial failed
};

struct BenchAggregate {
  int size = 0;
  std::string method;
  int trials = 0;
  int completed = 0;
  double mean_distance_km = 0.0;
  double std_distance_km = 0.0;
  double mean_wall_seconds = 0.0;
  double std_wall_seconds = 0.0;
  bool incomplete() const noexcept { return completed < trials; }
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> aggregates;
};

BenchReport run_bench(const BenchConfig& cfg);

enum class ReportFormat { Table, Json, Csv };

/// With timings off the wall-clock columns are left out, so two runs with the
/// same seeds produce identical text.
std::string format_report(const BenchReport& report, ReportFormat format, bool timings = true);

}  // namespace cargo
