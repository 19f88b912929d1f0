#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cargo/abstraction.hpp"
#include "cargo/rng.hpp"

namespace cargo {

enum class Objective { Distance, Time };

std::string to_string(Objective o);

/**
 * One region's routing problem. Every index below is a member index into
 * `members`; the depot is a member that is never a customer. Vehicles have no
 * capacity and each route is a closed tour through the depot.
 */
struct VrpInstance {
  std::vector<SiteIndex> members;  // external labels for output
  std::vector<Point> coords;       // planar km, used for move sampling
  std::shared_ptr<const CostMatrix> costs;
  int depot = 0;
  int n_vehicles = 1;
  Objective objective = Objective::Distance;

  int size() const noexcept { return static_cast<int>(members.size()); }
  int customer_count() const noexcept { return size() - 1; }
  std::vector<int> customers() const;
  double cost(int a, int b) const noexcept {
    const auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
    return objective == Objective::Distance ? costs->dist(i, j) : costs->time(i, j);
  }
};

/// Throws std::invalid_argument when the instance is malformed.
void check_instance(const VrpInstance& inst);

/// ceil(customers / per_vehicle), at least 1.
int default_vehicle_count(int customers, int customers_per_vehicle = 50);

struct Solution {
  std::vector<std::vector<int>> routes;  // customers in visiting order; depot implicit at both ends
  double cost = 0.0;
  friend bool operator==(const Solution&, const Solution&) = default;
};

double route_cost(const VrpInstance& inst, std::span<const int> route);
double solution_cost(const VrpInstance& inst, const Solution& sol);

struct PlanTotals {
  double distance_km = 0.0;
  double time_h = 0.0;
};
/// Distance and time of a solution regardless of the instance objective.
PlanTotals solution_totals(const VrpInstance& inst, const Solution& sol);

/// Empty string iff every customer appears exactly once and nothing else does.
std::string coverage_violation(const VrpInstance& inst, const Solution& sol);

/// Cheapest insertion from empty routes.
Solution initial_solution(const VrpInstance& inst);

/**
 * Inserts `customers` into `sol` one at a time: each round picks the customer
 * whose cheapest position (any route, any slot including right after the
 * depot) adds least cost. Ties: lower customer, lower route, earlier slot.
 */
void cheapest_insert(const VrpInstance& inst, Solution& sol, std::span<const int> customers);

struct TabuParams {
  int m_nodes = 10;
  int s_targets = 30;
  double min_sampling_distance_km = 1e-6;
};

struct StopRule {
  enum class Mode { WallClock, Iterations };
  Mode mode = Mode::Iterations;
  double seconds = 10.0;
  long iterations = 1000;

  static StopRule wall_clock(double s) { return {Mode::WallClock, s, 0}; }
  static StopRule no_improvement_iterations(long n) { return {Mode::Iterations, 0.0, n}; }
  std::string describe() const;
};

inline constexpr int kDepotSlot = -1;

/// Relocate `customer` to just after `after` (a customer, or kDepotSlot for the start of `route`).
struct Move {
  int customer = 0;
  int route = 0;
  int after = kDepotSlot;
  double delta = 0.0;
  friend bool operator==(const Move&, const Move&) = default;
};

/// Weighted sampling without replacement (Efraimidis-Spirakis keys log(u) / w).
/// Returns min(count, weights.size()) indices in draw order.
std::vector<std::size_t> weighted_sample(std::span<const double> weights, std::size_t count, Rng& rng);

/// ceil(0.05 * customers).
int tabu_tenure(int customers);

/**
 * Tabu search over relocate moves. The tabu attribute is the moved customer: a
 * customer moved at iteration t may not move again during iterations
 * t+1 .. t+tenure unless the move improves on the best cost (aspiration).
 */
class TabuSearch {
public:
  TabuSearch(const VrpInstance& inst, Solution start, const TabuParams& params, std::uint64_t seed);

  /// Samples m_nodes customers and, for each, s_targets insertion targets with
  /// probability proportional to 1 / max(euclidean distance, epsilon).
  std::vector<Move> candidate_moves();

  /// One iteration; returns true when the best solution improved.
  bool step();

  void apply(const Move& move);
  double move_delta(int customer, int route, int after) const;

  const Solution& current() const noexcept { return current_; }
  const Solution& best() const noexcept { return best_; }
  long iteration() const noexcept { return iteration_; }
  int tenure() const noexcept { return tenure_; }
  bool is_tabu(int customer) const { return tabu_until_[static_cast<std::size_t>(customer)] >= iteration_ + 1; }
  long tabu_until(int customer) const { return tabu_until_[static_cast<std::size_t>(customer)]; }
  const std::optional<Move>& last_move() const noexcept { return last_move_; }
  bool last_was_aspiration() const noexcept { return last_aspiration_; }

private:
  int prev_of(int customer) const;
  int next_of(int customer) const;
  int first_of(int route) const;
  void reindex(int route);

  const VrpInstance& inst_;
  TabuParams params_;
  Rng rng_;
  Solution current_;
  Solution best_;
  std::vector<double> route_costs_;
  std::vector<int> route_of_;
  std::vector<int> pos_of_;
  std::vector<long> tabu_until_;
  std::vector<int> pool_;
  long iteration_ = 0;
  int tenure_ = 1;
  std::optional<Move> last_move_;
  bool last_aspiration_ = false;
};

struct SolveReport {
  Solution best;
  double initial_cost = 0.0;
  long iterations = 0;
  double wall_seconds = 0.0;
};

/// initial_solution, then Tabu steps until the stop rule fires.
SolveReport solve(const VrpInstance& inst, const StopRule& stop, std::uint64_t seed, const TabuParams& params = {});

/// Tabu steps from a given solution.
SolveReport improve(const VrpInstance& inst, Solution start, const StopRule& stop, std::uint64_t seed,
                    const TabuParams& params = {});

/// `D <depot>`, `V <vehicle> <site> ...` per vehicle, `S <cost> <iterations> <wall_s>`.
std::string serialize_solution(const VrpInstance& inst, const Solution& sol, std::span<const int> vehicle_ids,
                               const SolveReport* report = nullptr);

}  // namespace cargo
