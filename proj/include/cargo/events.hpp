#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cargo/abstraction.hpp"
#include "cargo/netmodel.hpp"
#include "cargo/pipeline.hpp"

namespace cargo {

struct NewParcel {
  Point at;
};

struct VehicleBreakdown {
  int region = 0;
  int vehicle = 0;
};

struct BorderClosed {
  std::vector<std::pair<LocationId, LocationId>> edges;
};

using AdHocEvent = std::variant<NewParcel, VehicleBreakdown, BorderClosed>;

std::string event_kind(const AdHocEvent& e);

/// Road network and abstract graph the plan was built from.
struct GraphState {
  RoadNetwork network;
  AbstractGraph graph;
};

/// Default event stop rule: 20 s without improvement.
inline StopRule default_event_stop() { return StopRule::wall_clock(20.0); }

struct EventOutcome {
  std::vector<int> touched_regions;
  SiteIndex new_site = -1;  // new_parcel only
  double seconds = 0.0;
};

/**
 * Applies one event to `plan` and `state`, re-optimising only the affected
 * regions. Both are left unchanged when the event throws.
 *   new_parcel        snaps to the nearest road node and joins the region with the nearest depot by travel time
 *   vehicle_breakdown drops the named vehicle and reinserts its customers
 *   border_closed     removes road edges, rebuilds changed abstract rows and re-solves regions whose costs changed
 */
EventOutcome handle_event(DistributionPlan& plan, GraphState& state, const AdHocEvent& event, const StopRule& stop);

/// One JSON object per line:
///   {"kind":"new_parcel","x":1.5,"y":2}
///   {"kind":"vehicle_breakdown","region":0,"vehicle":1}
///   {"kind":"border_closed","edges":[[3,4],[4,9]]}
AdHocEvent parse_event(std::string_view line);

/// Parses every non-blank, non-`#` line; ParseError carries the line number.
std::vector<AdHocEvent> parse_events(std::string_view text);

std::string format_event(const AdHocEvent& e);

}  // namespace cargo
