#include "dronesafe/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dronesafe {

std::string_view constraint_name(Constraint c) {
  switch (c) {
    case Constraint::kBattery:
      return "battery";
    case Constraint::kDuplicate:
      return "duplicate";
    case Constraint::kRoute:
      return "route";
    case Constraint::kSector:
      return "sector";
  }
  return "unknown";
}

HallucinationClass to_hallucination(Constraint c) {
  switch (c) {
    case Constraint::kBattery:
      return HallucinationClass::kBattery;
    case Constraint::kDuplicate:
      return HallucinationClass::kDuplicate;
    case Constraint::kRoute:
      return HallucinationClass::kRoute;
    case Constraint::kSector:
      return HallucinationClass::kSector;
  }
  return HallucinationClass::kPass;
}

void ConstraintConfig::validate() const {
  if (!std::isfinite(battery_reserve) || !std::isfinite(route_slack) || !std::isfinite(sector_tolerance)) {
    throw std::invalid_argument("constraint thresholds must be finite");
  }
  if (route_slack < 0.0) throw std::invalid_argument("route_slack must be >= 0");
}

double ConstraintReport::hinge(Constraint c) const {
  return std::max(0.0, g[static_cast<std::size_t>(c)]);
}

std::array<double, kConstraintCount> ConstraintReport::hinge_costs() const {
  std::array<double, kConstraintCount> out{};
  for (Constraint c : kAllConstraints) out[static_cast<std::size_t>(c)] = hinge(c);
  return out;
}

std::optional<Constraint> ConstraintReport::worst() const {
  std::optional<Constraint> best;
  for (Constraint c : kAllConstraints) {
    const double v = g[static_cast<std::size_t>(c)];
    if (!(v > 0.0)) continue;
    if (!best || v > g[static_cast<std::size_t>(*best)]) best = c;
  }
  return best;
}

namespace {

bool on_ground_at_base(const World& world, const DroneState& d) {
  return d.position == world.config().grid.warehouse && d.mode == DroneMode::kGrounded;
}

double idle_energy(const World& world, const DroneState& d) {
  if (on_ground_at_base(world, d)) return 0.0;
  return hover_energy(world.config().grid.time_step, world.config().aircraft) +
         world.energy_to_base(d.position);
}

bool targets_valid_customer(const World& world, DroneId drone, const Action& a) {
  if (a.kind != ActionKind::kMoveToCustomer) return false;
  const Customer* c = world.find_customer(a.customer);
  if (c == nullptr || c->status == CustomerStatus::kServed) return false;
  return !(c->status == CustomerStatus::kAssigned && c->assigned_to != drone);
}

double route_g(const World& world, DroneId drone, CustomerId target, const ConstraintConfig& config) {
  const DroneState& d = world.drone(drone);
  const Customer& c = *world.find_customer(target);
  const auto& params = world.config().aircraft;
  const Vec2 base = world.config().grid.warehouse;

  std::vector<Stop> claims = world.claimed_stops(drone);
  const bool claimed = std::any_of(claims.begin(), claims.end(), [&](const Stop& s) { return s.id == target; });
  std::vector<Stop> rest;
  for (const Stop& s : claims) {
    if (s.id != target) rest.push_back(s);
  }
  std::vector<Stop> optimal_set = claims;
  if (!claimed && on_ground_at_base(world, d) && c.status == CustomerStatus::kPending &&
      static_cast<int>(claims.size()) < std::min(params.max_packages, kMaxRouteStops)) {
    optimal_set.push_back({target, c.position});
  }
  if (rest.size() > static_cast<std::size_t>(kMaxRouteStops)) return -1.0;
  const double optimal = plan_route(d.position, optimal_set, true, CostMode::kDistance, params, base).total_cost;
  if (!(optimal > 0.0)) return -1.0;
  const double proposed = distance(d.position, c.position) +
                          plan_route(c.position, rest, true, CostMode::kDistance, params, base).total_cost;
  return proposed / ((1.0 + config.route_slack) * optimal) - 1.0;
}

}  // namespace

double committed_energy(const World& world, DroneId drone, const Action& action) {
  const DroneState& d = world.drone(drone);
  switch (action.kind) {
    case ActionKind::kGoToSectorEast:
    case ActionKind::kGoToSectorWest:
    case ActionKind::kGoToSectorNorth:
    case ActionKind::kGoToSectorSouth:
      if (!world.at_base(d)) return idle_energy(world, d);
      return world.claim_for(drone, *action.target_sector()).route_energy_kwh;
    case ActionKind::kMoveToCustomer: {
      const Customer* c = world.find_customer(action.customer);
      if (c == nullptr) return idle_energy(world, d);
      return world.energy_between(d.position, c->position) + world.energy_to_base(c->position);
    }
    case ActionKind::kReturnToBase:
      return world.energy_to_base(d.position);
    case ActionKind::kGlobalIdle:
    case ActionKind::kLocalIdle:
    case ActionKind::kPass:
      return idle_energy(world, d);
  }
  return 0.0;
}

ConstraintReport evaluate_constraints(const World& world, DroneId drone, const Action& action,
                                      const ConstraintConfig& config) {
  const DroneState& d = world.drone(drone);
  ConstraintReport r;
  auto& g = r.g;

  if (!action.is_pass()) {
    const double energy = committed_energy(world, drone, action);
    if (energy > 0.0) {
      const double projected = d.soc.fraction() - energy / world.config().battery.capacity_kwh;
      g[0] = config.battery_reserve - projected;
    }
  }

  if (action.kind == ActionKind::kMoveToCustomer) {
    g[1] = targets_valid_customer(world, drone, action) ? -1.0 : 1.0;
    if (g[1] < 0.0) g[2] = route_g(world, drone, action.customer, config);
  }

  if (const auto sector = action.target_sector(); sector && world.at_base(d)) {
    const int after = world.drones_assigned_to(*sector) + (d.sector_assignment == sector ? 0 : 1);
    g[3] = after - (world.ideal_sector_share(*sector) + config.sector_tolerance);
  }

  for (Constraint c : kAllConstraints) {
    const auto i = static_cast<std::size_t>(c);
    if (!config.enabled[i]) g[i] = -1.0;
    if (g[i] > 0.0) {
      r.violated.push_back(c);
      r.cost += g[i];
    }
  }
  return r;
}

std::optional<Action> action_for_slot(const World& world, DroneId drone, PolicySlot slot) {
  const Tier tier = world.tier_of(drone);
  switch (slot) {
    case PolicySlot::kGoEast:
      return tier == Tier::kGlobal ? std::optional(Action::go_to_sector(Sector::kEast)) : std::nullopt;
    case PolicySlot::kGoWest:
      return tier == Tier::kGlobal ? std::optional(Action::go_to_sector(Sector::kWest)) : std::nullopt;
    case PolicySlot::kGoNorth:
      return tier == Tier::kGlobal ? std::optional(Action::go_to_sector(Sector::kNorth)) : std::nullopt;
    case PolicySlot::kGoSouth:
      return tier == Tier::kGlobal ? std::optional(Action::go_to_sector(Sector::kSouth)) : std::nullopt;
    case PolicySlot::kIdle:
      return tier == Tier::kGlobal ? Action::global_idle() : Action::local_idle();
    case PolicySlot::kMoveNext: {
      if (tier == Tier::kGlobal) return std::nullopt;
      const Route route = world.optimal_route(drone);
      if (route.stops.empty()) return std::nullopt;
      return Action::move_to_customer(route.stops.front());
    }
    case PolicySlot::kReturnToBase:
      return tier == Tier::kGlobal ? std::nullopt : std::optional(Action::return_to_base());
  }
  return std::nullopt;
}

std::uint8_t applicable_slots(const World& world, DroneId drone) {
  std::uint8_t mask = 0;
  for (int i = 0; i < kPolicySlotCount; ++i) {
    if (action_for_slot(world, drone, static_cast<PolicySlot>(i))) mask |= static_cast<std::uint8_t>(1U << i);
  }
  return mask;
}

namespace {

bool is_feasible(const World& world, DroneId drone, const Action& a, const ConstraintConfig& config) {
  return evaluate_constraints(world, drone, a, config).feasible();
}

std::optional<Action> least_loaded_sector(const World& world) {
  std::optional<Sector> best;
  for (Sector s : kAllSectors) {
    if (world.pending_in(s) == 0) continue;
    if (!best || world.drones_assigned_to(s) < world.drones_assigned_to(*best)) best = s;
  }
  if (!best) return std::nullopt;
  return Action::go_to_sector(*best);
}

std::optional<Action> next_route_stop(const World& world, DroneId drone) {
  return action_for_slot(world, drone, PolicySlot::kMoveNext);
}

std::vector<Action> ladder_candidates(const World& world, DroneId drone, const Action& proposed,
                                      const ConstraintReport& report) {
  std::vector<Action> out;
  auto add = [&out](std::optional<Action> a) {
    if (a) out.push_back(*a);
  };
  const std::optional<Constraint> worst = report.worst();
  if (world.tier_of(drone) == Tier::kGlobal) {
    if (worst == Constraint::kBattery) {
      out.push_back(Action::global_idle());
    } else {
      add(least_loaded_sector(world));
    }
    out.push_back(Action::global_idle());
    return out;
  }
  if (!worst || proposed.is_pass()) {
    add(next_route_stop(world, drone));
  } else {
    switch (*worst) {
      case Constraint::kBattery:
        out.push_back(Action::return_to_base());
        break;
      case Constraint::kDuplicate:
      case Constraint::kRoute:
        add(next_route_stop(world, drone));
        break;
      case Constraint::kSector:
        break;
    }
  }
  out.push_back(Action::return_to_base());
  out.push_back(Action::local_idle());
  return out;
}

}  // namespace

Action select_fallback(const World& world, DroneId drone, const Action& proposed,
                       const ConstraintReport& report, const FallbackSource& source,
                       const ConstraintConfig& config, std::string* reason) {
  if (source.kind == FallbackSource::Kind::kPolicy && source.scorer != nullptr) {
    const auto scores = source.scorer->score(world.observe(drone));
    std::optional<Action> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kPolicySlotCount; ++i) {
      const auto a = action_for_slot(world, drone, static_cast<PolicySlot>(i));
      if (!a || !is_feasible(world, drone, *a, config)) continue;
      if (!best || scores[static_cast<std::size_t>(i)] > best_score) {
        best = a;
        best_score = scores[static_cast<std::size_t>(i)];
      }
    }
    if (best) {
      if (reason) *reason = "policy";
      return *best;
    }
  }
  for (const Action& a : ladder_candidates(world, drone, proposed, report)) {
    if (is_feasible(world, drone, a, config)) {
      if (reason) *reason = "ladder";
      return a;
    }
  }
  if (reason) *reason = "no_feasible_action";
  return world.tier_of(drone) == Tier::kGlobal ? Action::global_idle() : Action::return_to_base();
}

OverrideOutcome filter_action(const World& world, DroneId drone, const Action& proposed,
                              const FallbackSource& source, const ConstraintConfig& config,
                              bool enforce, bool parse_failure) {
  OverrideOutcome out;
  out.proposed = proposed;
  out.executed = proposed;
  out.report = evaluate_constraints(world, drone, proposed, config);
  if (!enforce) {
    if (proposed.is_pass()) {
      out.executed = world.tier_of(drone) == Tier::kGlobal ? Action::global_idle() : Action::local_idle();
    }
    return out;
  }
  if (proposed.is_pass()) {
    out.fault_class = parse_failure ? HallucinationClass::kParseFailure : HallucinationClass::kPass;
  } else if (const auto worst = out.report.worst()) {
    out.fault_class = to_hallucination(*worst);
  } else {
    return out;
  }
  std::string reason;
  out.executed = select_fallback(world, drone, proposed, out.report, source, config, &reason);
  out.fallback_reason = reason;
  out.overridden = true;
  return out;
}

long HallucinationStats::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

std::array<double, kHallucinationClassCount> HallucinationStats::shares() const {
  std::array<double, kHallucinationClassCount> out{};
  const long t = total();
  if (t == 0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / static_cast<double>(t);
  return out;
}

HallucinationStats& HallucinationStats::operator+=(const HallucinationStats& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

HallucinationStats audit(const std::array<long, kHallucinationClassCount>& counts) {
  HallucinationStats s;
  s.counts = counts;
  return s;
}

}  // namespace dronesafe
