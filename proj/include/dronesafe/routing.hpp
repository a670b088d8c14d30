#pragma once

#include <span>
#include <vector>

#include "dronesafe/action.hpp"
#include "dronesafe/energy.hpp"
#include "dronesafe/geometry.hpp"

namespace dronesafe {

enum class CostMode { kDistance, kEnergy };

struct Stop {
  CustomerId id = -1;
  Vec2 position;
};

struct Route {
  std::vector<CustomerId> stops;
  bool return_to_base = true;
  double total_cost = 0.0;  // metres or kWh, per the cost mode used
};

// Largest instance plan_route will enumerate.
inline constexpr int kMaxRouteStops = 4;

// Sum of leg costs from `start` through `stops` in order, plus the leg back
// to `base` when `return_to_base` is set.
double route_cost(Vec2 start, std::span<const Stop> stops, bool return_to_base, CostMode mode,
                  const AircraftParams& params, Vec2 base = {});

// Exhaustive minimum over every visiting order. Ties go to the
// lexicographically smallest id sequence, so the result does not depend on
// the order customers are passed in. Throws std::invalid_argument when more
// than kMaxRouteStops customers are given or ids repeat.
Route plan_route(Vec2 start, std::span<const Stop> customers, bool return_to_base, CostMode mode,
                 const AircraftParams& params, Vec2 base = {});

}  // namespace dronesafe
