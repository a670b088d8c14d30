#include "dronesafe/routing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dronesafe {

double route_cost(Vec2 start, std::span<const Stop> stops, bool return_to_base, CostMode mode,
                  const AircraftParams& params, Vec2 base) {
  double meters = 0.0;
  Vec2 at = start;
  for (const Stop& s : stops) {
    meters += distance(at, s.position);
    at = s.position;
  }
  if (return_to_base) meters += distance(at, base);
  return mode == CostMode::kDistance ? meters : meters * energy_per_meter(params);
}

Route plan_route(Vec2 start, std::span<const Stop> customers, bool return_to_base, CostMode mode,
                 const AircraftParams& params, Vec2 base) {
  if (customers.size() > static_cast<std::size_t>(kMaxRouteStops)) {
    throw std::invalid_argument("plan_route: more customers than the package limit");
  }
  // Canonical id order makes the enumeration independent of input order.
  std::vector<Stop> sorted(customers.begin(), customers.end());
  std::sort(sorted.begin(), sorted.end(), [](const Stop& a, const Stop& b) { return a.id < b.id; });
  if (std::adjacent_find(sorted.begin(), sorted.end(), [](const Stop& a, const Stop& b) {
        return a.id == b.id;
      }) != sorted.end()) {
    throw std::invalid_argument("plan_route: duplicate customer id");
  }

  std::vector<int> order(sorted.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Stop> candidate(sorted.size());

  Route best;
  best.return_to_base = return_to_base;
  bool have_best = false;
  // next_permutation from the sorted order visits id sequences
  // lexicographically, so a strict improvement test keeps the smallest tie.
  do {
    for (std::size_t i = 0; i < order.size(); ++i) candidate[i] = sorted[order[i]];
    const double cost = route_cost(start, candidate, return_to_base, CostMode::kDistance, params, base);
    if (!have_best || cost < best.total_cost) {
      have_best = true;
      best.total_cost = cost;
      best.stops.clear();
      for (const Stop& s : candidate) best.stops.push_back(s.id);
    }
  } while (std::next_permutation(order.begin(), order.end()));

  if (mode == CostMode::kEnergy) best.total_cost *= energy_per_meter(params);
  return best;
}

}  // namespace dronesafe
