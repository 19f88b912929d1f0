#pragma once

#include <string>

#include "cargo/pipeline.hpp"

namespace cargo {

struct PlanFormat {
  bool timings = true;  // wall-clock fields; off for byte comparisons
  int indent = 2;
};

/// Plan document: params, provenance, totals, and per region the depot, member
/// locations and each vehicle's stops as road location ids.
std::string plan_to_json(const DistributionPlan& plan, const PlanFormat& format = {});

/// FeatureCollection with one Point per site (region, depot flag) and one
/// LineString per non-empty route. Coordinates are the planar km values.
std::string plan_to_geojson(const DistributionPlan& plan);

/// Writes text to path, throwing std::runtime_error naming the path on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace cargo
