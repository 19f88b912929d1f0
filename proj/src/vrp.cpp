#include "cargo/vrp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cargo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
}

struct Slot {
  double delta = kInf;
  int route = 0;
  int pos = 0;

  bool better_than(const Slot& o) const {
    if (delta != o.delta) return delta < o.delta;
    if (route != o.route) return route < o.route;
    return pos < o.pos;
  }
};

double insert_delta(const VrpInstance& inst, const std::vector<int>& route, int pos, int customer) {
  const int prev = pos == 0 ? inst.depot : route[static_cast<std::size_t>(pos - 1)];
  const int next = pos == static_cast<int>(route.size()) ? inst.depot : route[static_cast<std::size_t>(pos)];
  return inst.cost(prev, customer) + inst.cost(customer, next) - inst.cost(prev, next);
}

Slot best_slot(const VrpInstance& inst, const Solution& sol, int customer) {
  Slot best;
  for (int r = 0; r < static_cast<int>(sol.routes.size()); ++r) {
    const auto& route = sol.routes[static_cast<std::size_t>(r)];
    for (int p = 0; p <= static_cast<int>(route.size()); ++p) {
      const Slot s{insert_delta(inst, route, p, customer), r, p};
      if (s.better_than(best)) best = s;
    }
  }
  return best;
}

}  // namespace

std::string to_string(Objective o) { return o == Objective::Distance ? "distance" : "time"; }

std::vector<int> VrpInstance::customers() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (i != depot) out.push_back(i);
  return out;
}

void check_instance(const VrpInstance& inst) {
  if (inst.members.empty()) throw std::invalid_argument("VrpInstance: no members");
  if (inst.coords.size() != inst.members.size()) throw std::invalid_argument("VrpInstance: coords size mismatch");
  if (!inst.costs || inst.costs->size() != inst.members.size())
    throw std::invalid_argument("VrpInstance: cost matrix must be square of side |members|");
  if (inst.depot < 0 || inst.depot >= inst.size()) throw std::invalid_argument("VrpInstance: depot not a member");
  if (inst.n_vehicles < 1) throw std::invalid_argument("VrpInstance: need at least one vehicle");
}

int default_vehicle_count(int customers, int customers_per_vehicle) {
  if (customers_per_vehicle < 1) throw std::invalid_argument("customers per vehicle must be positive");
  return std::max(1, (customers + customers_per_vehicle - 1) / customers_per_vehicle);
}

double route_cost(const VrpInstance& inst, std::span<const int> route) {
  if (route.empty()) return 0.0;
  double c = inst.cost(inst.depot, route.front());
  for (std::size_t i = 1; i < route.size(); ++i) c += inst.cost(route[i - 1], route[i]);
  return c + inst.cost(route.back(), inst.depot);
}

double solution_cost(const VrpInstance& inst, const Solution& sol) {
  double c = 0.0;
  for (const auto& r : sol.routes) c += route_cost(inst, r);
  return c;
}

PlanTotals solution_totals(const VrpInstance& inst, const Solution& sol) {
  PlanTotals t;
  const auto& m = *inst.costs;
  auto d = static_cast<std::size_t>(inst.depot);
  for (const auto& r : sol.routes) {
    std::size_t prev = d;
    for (int c : r) {
      t.distance_km += m.dist(prev, static_cast<std::size_t>(c));
      t.time_h += m.time(prev, static_cast<std::size_t>(c));
      prev = static_cast<std::size_t>(c);
    }
    if (!r.empty()) {
      t.distance_km += m.dist(prev, d);
      t.time_h += m.time(prev, d);
    }
  }
  return t;
}

std::string coverage_violation(const VrpInstance& inst, const Solution& sol) {
  std::vector<int> seen(static_cast<std::size_t>(inst.size()), 0);
  for (const auto& r : sol.routes) {
    for (int c : r) {
      if (c < 0 || c >= inst.size()) return "route holds unknown member " + std::to_string(c);
      if (c == inst.depot) return "route visits the depot as a customer";
      if (++seen[static_cast<std::size_t>(c)] > 1) return "customer " + std::to_string(c) + " visited twice";
    }
  }
  for (int c : inst.customers())
    if (seen[static_cast<std::size_t>(c)] == 0) return "customer " + std::to_string(c) + " not visited";
  return {};
}

void cheapest_insert(const VrpInstance& inst, Solution& sol, std::span<const int> customers) {
  std::vector<int> pending(customers.begin(), customers.end());
  std::sort(pending.begin(), pending.end());
  std::vector<Slot> best(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) best[i] = best_slot(inst, sol, pending[i]);

  while (!pending.empty()) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < pending.size(); ++i)
      if (best[i].delta < best[pick].delta) pick = i;
    const int u = pending[pick];
    const Slot at = best[pick];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    best.erase(best.begin() + static_cast<std::ptrdiff_t>(pick));

    auto& route = sol.routes[static_cast<std::size_t>(at.route)];
    route.insert(route.begin() + at.pos, u);

    for (std::size_t i = 0; i < pending.size(); ++i) {
      auto& b = best[i];
      if (b.route == at.route) {
        if (b.pos == at.pos) {
          b = best_slot(inst, sol, pending[i]);
          continue;
        }
        if (b.pos > at.pos) ++b.pos;
      }
      for (int p : {at.pos, at.pos + 1}) {
        const Slot s{insert_delta(inst, route, p, pending[i]), at.route, p};
        if (s.better_than(b)) b = s;
      }
    }
  }
  sol.cost = solution_cost(inst, sol);
}

Solution initial_solution(const VrpInstance& inst) {
  check_instance(inst);
  Solution sol;
  sol.routes.resize(static_cast<std::size_t>(inst.n_vehicles));
  const auto customers = inst.customers();
  cheapest_insert(inst, sol, customers);
  return sol;
}

std::vector<std::size_t> weighted_sample(std::span<const double> weights, std::size_t count, Rng& rng) {
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    keys.emplace_back(std::log(u) / weights[i], i);
  }
  count = std::min(count, keys.size());
  auto larger = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; };
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(), larger);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(keys[i].second);
  return out;
}

int tabu_tenure(int customers) {
  return static_cast<int>(std::ceil(0.05 * static_cast<double>(customers)));
}

std::string StopRule::describe() const {
  if (mode == Mode::WallClock) return "no improvement for " + std::to_string(seconds) + " s";
  return "no improvement for " + std::to_string(iterations) + " iterations";
}

TabuSearch::TabuSearch(const VrpInstance& inst, Solution start, const TabuParams& params, std::uint64_t seed)
    : inst_(inst), params_(params), rng_(seed), current_(std::move(start)) {
  check_instance(inst);
  if (params.m_nodes < 1 || params.s_targets < 1) throw std::invalid_argument("TabuParams: m_nodes, s_targets >= 1");
  if (auto why = coverage_violation(inst, current_); !why.empty())
    throw std::invalid_argument("TabuSearch: start solution invalid: " + why);
  const auto n = static_cast<std::size_t>(inst.size());
  route_of_.assign(n, -1);
  pos_of_.assign(n, -1);
  tabu_until_.assign(n, std::numeric_limits<long>::min());
  route_costs_.resize(current_.routes.size());
  for (int r = 0; r < static_cast<int>(current_.routes.size()); ++r) {
    reindex(r);
    route_costs_[static_cast<std::size_t>(r)] = route_cost(inst, current_.routes[static_cast<std::size_t>(r)]);
  }
  current_.cost = std::accumulate(route_costs_.begin(), route_costs_.end(), 0.0);
  best_ = current_;
  pool_ = inst.customers();
  tenure_ = tabu_tenure(static_cast<int>(pool_.size()));
}

void TabuSearch::reindex(int route) {
  const auto& r = current_.routes[static_cast<std::size_t>(route)];
  for (std::size_t i = 0; i < r.size(); ++i) {
    route_of_[static_cast<std::size_t>(r[i])] = route;
    pos_of_[static_cast<std::size_t>(r[i])] = static_cast<int>(i);
  }
}

int TabuSearch::prev_of(int c) const {
  const int p = pos_of_[static_cast<std::size_t>(c)];
  return p == 0 ? inst_.depot : current_.routes[static_cast<std::size_t>(route_of_[static_cast<std::size_t>(c)])][static_cast<std::size_t>(p - 1)];
}

int TabuSearch::next_of(int c) const {
  const auto& r = current_.routes[static_cast<std::size_t>(route_of_[static_cast<std::size_t>(c)])];
  const auto p = static_cast<std::size_t>(pos_of_[static_cast<std::size_t>(c)]);
  return p + 1 == r.size() ? inst_.depot : r[p + 1];
}

int TabuSearch::first_of(int route) const {
  const auto& r = current_.routes[static_cast<std::size_t>(route)];
  return r.empty() ? inst_.depot : r.front();
}

double TabuSearch::move_delta(int i, int route, int after) const {
  const int p = prev_of(i);
  const int n = next_of(i);
  const double removal = inst_.cost(p, n) - inst_.cost(p, i) - inst_.cost(i, n);
  int from = inst_.depot;
  int to = inst_.depot;
  if (after == kDepotSlot) {
    to = first_of(route);
    // i is first on its own route only when this is a no-op; callers exclude that case.
    if (to == i) to = n;
  } else {
    from = after;
    to = next_of(after);
    if (to == i) to = n;
  }
  return removal + inst_.cost(from, i) + inst_.cost(i, to) - inst_.cost(from, to);
}

std::vector<Move> TabuSearch::candidate_moves() {
  std::vector<Move> moves;
  const auto n_customers = pool_.size();
  if (n_customers == 0) return moves;
  const auto picks = std::min<std::size_t>(static_cast<std::size_t>(params_.m_nodes), n_customers);
  for (std::size_t k = 0; k < picks; ++k) {
    const auto j = k + static_cast<std::size_t>(rng_.below(n_customers - k));
    std::swap(pool_[k], pool_[j]);
  }

  const int n_routes = static_cast<int>(current_.routes.size());
  std::vector<Move> targets;
  std::vector<double> weights;
  for (std::size_t k = 0; k < picks; ++k) {
    const int i = pool_[k];
    const int prev = prev_of(i);
    const int home = route_of_[static_cast<std::size_t>(i)];
    const Point& pi = inst_.coords[static_cast<std::size_t>(i)];
    targets.clear();
    weights.clear();
    const double eps = params_.min_sampling_distance_km;
    for (int j : pool_) {
      if (j == i || j == prev) continue;
      targets.push_back({i, route_of_[static_cast<std::size_t>(j)], j, 0.0});
      weights.push_back(1.0 / std::max(euclidean(pi, inst_.coords[static_cast<std::size_t>(j)]), eps));
    }
    const double depot_w =
        1.0 / std::max(euclidean(pi, inst_.coords[static_cast<std::size_t>(inst_.depot)]), eps);
    for (int r = 0; r < n_routes; ++r) {
      if (r == home && prev == inst_.depot) continue;
      targets.push_back({i, r, kDepotSlot, 0.0});
      weights.push_back(depot_w);
    }
    for (auto idx : weighted_sample(weights, static_cast<std::size_t>(params_.s_targets), rng_)) {
      Move m = targets[idx];
      m.delta = move_delta(m.customer, m.route, m.after);
      moves.push_back(m);
    }
  }
  return moves;
}

void TabuSearch::apply(const Move& m) {
  const int from_route = route_of_[static_cast<std::size_t>(m.customer)];
  auto& src = current_.routes[static_cast<std::size_t>(from_route)];
  src.erase(src.begin() + pos_of_[static_cast<std::size_t>(m.customer)]);
  reindex(from_route);

  auto& dst = current_.routes[static_cast<std::size_t>(m.route)];
  const int at = m.after == kDepotSlot ? 0 : pos_of_[static_cast<std::size_t>(m.after)] + 1;
  dst.insert(dst.begin() + at, m.customer);
  reindex(m.route);

  route_costs_[static_cast<std::size_t>(from_route)] = route_cost(inst_, src);
  route_costs_[static_cast<std::size_t>(m.route)] = route_cost(inst_, dst);
  current_.cost = std::accumulate(route_costs_.begin(), route_costs_.end(), 0.0);
}

bool TabuSearch::step() {
  const long t = iteration_ + 1;
  const auto moves = candidate_moves();
  const Move* chosen = nullptr;
  bool aspiration = false;
  for (const auto& m : moves) {
    const bool tabu = tabu_until_[static_cast<std::size_t>(m.customer)] >= t;
    const bool aspires = tabu && improves(current_.cost + m.delta, best_.cost);
    if (tabu && !aspires) continue;
    if (!chosen || m.delta < chosen->delta) {
      chosen = &m;
      aspiration = aspires;
    }
  }
  iteration_ = t;
  last_aspiration_ = false;
  if (!chosen) {
    last_move_.reset();
    return false;
  }
  const Move m = *chosen;
  apply(m);
  last_move_ = m;
  last_aspiration_ = aspiration;
  tabu_until_[static_cast<std::size_t>(m.customer)] = t + tenure_;
  if (improves(current_.cost, best_.cost)) {
    best_ = current_;
    return true;
  }
  return false;
}

SolveReport improve(const VrpInstance& inst, Solution start, const StopRule& stop, std::uint64_t seed,
                    const TabuParams& params) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  SolveReport report;
  start.cost = solution_cost(inst, start);
  report.initial_cost = start.cost;
  if (inst.customer_count() <= 1) {
    report.best = std::move(start);
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return report;
  }

  TabuSearch search(inst, std::move(start), params, seed);
  long last_iter = 0;
  auto last_time = Clock::now();
  while (true) {
    if (search.step()) {
      last_iter = search.iteration();
      last_time = Clock::now();
    }
    if (stop.mode == StopRule::Mode::Iterations) {
      if (search.iteration() - last_iter >= stop.iterations) break;
    } else if (std::chrono::duration<double>(Clock::now() - last_time).count() >= stop.seconds) {
      break;
    }
  }
  report.best = search.best();
  report.best.cost = solution_cost(inst, report.best);
  report.iterations = search.iteration();
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

SolveReport solve(const VrpInstance& inst, const StopRule& stop, std::uint64_t seed, const TabuParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  auto report = improve(inst, initial_solution(inst), stop, seed, params);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string serialize_solution(const VrpInstance& inst, const Solution& sol, std::span<const int> vehicle_ids,
                               const SolveReport* report) {
  std::string out = "D " + std::to_string(inst.members[static_cast<std::size_t>(inst.depot)]) + '\n';
  for (std::size_t v = 0; v < sol.routes.size(); ++v) {
    out += "V " + std::to_string(v < vehicle_ids.size() ? vehicle_ids[v] : static_cast<int>(v));
    for (int c : sol.routes[v]) out += ' ' + std::to_string(inst.members[static_cast<std::size_t>(c)]);
    out += '\n';
  }
  out += "S " + format_double(sol.cost);
  if (report) out += ' ' + std::to_string(report->iterations) + ' ' + format_double(report->wall_seconds);
  out += '\n';
  return out;
}

}  // namespace cargo
