#include "dronesafe/world.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace dronesafe {

void GridConfig::validate() const {
  if (!(half_extent > 0.0)) throw std::invalid_argument("grid half_extent must be positive");
  if (!(time_step > 0.0)) throw std::invalid_argument("grid time_step must be positive");
  if (max_steps < 1) throw std::invalid_argument("grid max_steps must be >= 1");
  if (drone_count < 1) throw std::invalid_argument("grid drone_count must be >= 1");
  if (std::abs(warehouse.x) > half_extent || std::abs(warehouse.y) > half_extent) {
    throw std::invalid_argument("warehouse lies outside the grid");
  }
}

void SpawnConfig::validate() const {
  if (min_per_sector < 0 || max_per_sector < min_per_sector) {
    throw std::invalid_argument("spawn range must satisfy 0 <= min_per_sector <= max_per_sector");
  }
}

void WorldConfig::validate() const {
  grid.validate();
  spawn.validate();
  aircraft.validate();
  battery.validate();
}

WorldConfig WorldConfig::desk_scale() {
  WorldConfig c;
  c.battery = BatteryModel::desk_scale();
  return c;
}

std::string_view mode_name(DroneMode mode) {
  switch (mode) {
    case DroneMode::kGrounded:
      return "grounded";
    case DroneMode::kTransit:
      return "transit";
    case DroneMode::kDelivering:
      return "delivering";
    case DroneMode::kCharging:
      return "charging";
    case DroneMode::kDepleted:
      return "depleted";
  }
  return "unknown";
}

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::kDelivered:
      return "delivered";
    case EventKind::kDepleted:
      return "depleted";
    case EventKind::kCharged:
      return "charged";
    case EventKind::kLanded:
      return "landed";
    case EventKind::kDispatched:
      return "dispatched";
    case EventKind::kDuplicateArrival:
      return "duplicate_arrival";
    case EventKind::kInvalidAction:
      return "invalid_action";
    case EventKind::kOverridden:
      return "overridden";
    case EventKind::kPlannerFallback:
      return "planner_fallback";
  }
  return "unknown";
}

Eigen::VectorXd Observation::to_vector() const {
  Eigen::VectorXd v(kSize);
  int i = 0;
  v[i++] = normalized_position[0];
  v[i++] = normalized_position[1];
  v[i++] = battery;
  for (double p : sector_pending) v[i++] = p;
  for (double a : sector_assignment) v[i++] = a;
  v[i++] = normalized_distance;
  return v;
}

Observation Observation::from_vector(const Eigen::VectorXd& v) {
  if (v.size() != kSize) throw std::invalid_argument("observation vector has the wrong size");
  Observation o;
  int i = 0;
  o.normalized_position = {v[0], v[1]};
  i = 2;
  o.battery = v[i++];
  for (double& p : o.sector_pending) p = v[i++];
  for (double& a : o.sector_assignment) a = v[i++];
  o.normalized_distance = v[i++];
  return o;
}

double reward_of(const RewardWeights& w, const DroneOutcome& o) {
  return w.delivery * o.deliveries - w.distance * o.distance - w.battery * o.energy_kwh;
}

namespace {

// Uniform point in the wedge around +x clipped to the square: the triangle
// (0,0), (h,h), (h,-h). x has density proportional to x, y is uniform in
// [-x, x].
Vec2 sample_east_wedge(Rng& rng, double half_extent) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double x = half_extent * std::sqrt(1.0 - unit(rng));
  const double y = x * (2.0 * unit(rng) - 1.0);
  return {x, y};
}

Vec2 rotate_into(Sector s, Vec2 p) {
  switch (s) {
    case Sector::kEast:
      return p;
    case Sector::kNorth:
      return {-p.y, p.x};
    case Sector::kWest:
      return {-p.x, -p.y};
    case Sector::kSouth:
      return {p.y, -p.x};
  }
  return p;
}

}  // namespace

std::vector<Customer> spawn_customers(Rng& rng, const SpawnConfig& spawn, const GridConfig& grid) {
  spawn.validate();
  std::vector<Customer> out;
  std::uniform_int_distribution<int> count(spawn.min_per_sector, spawn.max_per_sector);
  for (Sector s : kAllSectors) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      Customer c;
      c.id = static_cast<CustomerId>(out.size());
      c.position = rotate_into(s, sample_east_wedge(rng, grid.half_extent));
      c.sector = s;
      out.push_back(c);
    }
  }
  return out;
}

WorldState World::init_episode(std::uint64_t seed, const WorldConfig& config) {
  config.validate();
  WorldState st;
  st.seed = seed;
  st.rng.seed(seed);
  st.customers = spawn_customers(st.rng, config.spawn, config.grid);
  st.total_spawned = static_cast<int>(st.customers.size());
  st.drones.resize(static_cast<std::size_t>(config.grid.drone_count));
  for (int i = 0; i < config.grid.drone_count; ++i) {
    DroneState& d = st.drones[static_cast<std::size_t>(i)];
    d.id = i;
    d.position = config.grid.warehouse;
  }
  return st;
}

World::World(WorldConfig config, std::uint64_t seed)
    : config_(std::move(config)), state_(init_episode(seed, config_)),
      energy_per_meter_(energy_per_meter(config_.aircraft)) {}

World::World(WorldConfig config, WorldState state)
    : config_(std::move(config)), state_(std::move(state)),
      energy_per_meter_(energy_per_meter(config_.aircraft)) {
  config_.validate();
  if (state_.total_spawned == 0) state_.total_spawned = static_cast<int>(state_.customers.size());
}

const DroneState& World::drone(DroneId id) const {
  if (id < 0 || id >= static_cast<DroneId>(state_.drones.size())) {
    throw std::out_of_range("unknown drone id " + std::to_string(id));
  }
  return state_.drones[static_cast<std::size_t>(id)];
}

const Customer* World::find_customer(CustomerId id) const {
  if (id < 0 || id >= static_cast<CustomerId>(state_.customers.size())) return nullptr;
  const Customer& c = state_.customers[static_cast<std::size_t>(id)];
  return c.id == id ? &c : nullptr;
}

bool World::at_base(const DroneState& d) const {
  return d.position == config_.grid.warehouse && d.mode == DroneMode::kGrounded && d.claimed.empty();
}

Tier World::tier_of(DroneId id) const { return at_base(drone(id)) ? Tier::kGlobal : Tier::kLocal; }

bool World::needs_decision(DroneId id) const {
  const DroneMode m = drone(id).mode;
  return m != DroneMode::kCharging && m != DroneMode::kDepleted;
}

double World::energy_between(Vec2 a, Vec2 b) const { return distance(a, b) * energy_per_meter_; }

double World::energy_to_base(Vec2 from) const {
  return energy_between(from, config_.grid.warehouse);
}

std::vector<Stop> World::claimed_stops(DroneId id) const {
  std::vector<Stop> stops;
  for (CustomerId c : drone(id).claimed) {
    const Customer* cust = find_customer(c);
    if (cust != nullptr && cust->status != CustomerStatus::kServed) stops.push_back({c, cust->position});
  }
  return stops;
}

Route World::optimal_route(DroneId id) const {
  const std::vector<Stop> stops = claimed_stops(id);
  return plan_route(drone(id).position, stops, true, CostMode::kDistance, config_.aircraft,
                    config_.grid.warehouse);
}

SectorClaim World::claim_for(DroneId id, Sector sector) const {
  const DroneState& d = drone(id);
  const Vec2 base = config_.grid.warehouse;
  const double budget =
      (d.soc.fraction() - config_.battery.reserve_fraction) * config_.battery.capacity_kwh;

  std::vector<const Customer*> candidates;
  for (const Customer& c : state_.customers) {
    if (c.sector == sector && c.status == CustomerStatus::kPending) candidates.push_back(&c);
  }
  SectorClaim claim;
  if (candidates.empty()) return claim;
  std::sort(candidates.begin(), candidates.end(), [&](const Customer* a, const Customer* b) {
    const double da = distance(a->position, base);
    const double db = distance(b->position, base);
    if (da != db) return da > db;
    return a->id < b->id;
  });

  std::vector<Stop> stops{{candidates.front()->id, candidates.front()->position}};
  candidates.erase(candidates.begin());
  auto energy_of = [&](const std::vector<Stop>& s) {
    return plan_route(base, s, true, CostMode::kEnergy, config_.aircraft, base).total_cost;
  };
  claim.route_energy_kwh = energy_of(stops);
  claim.within_budget = claim.route_energy_kwh <= budget;

  const auto limit = static_cast<std::size_t>(
      std::min(config_.aircraft.max_packages, kMaxRouteStops));
  while (claim.within_budget && stops.size() < limit) {
    std::size_t best = candidates.size();
    double best_energy = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::vector<Stop> trial = stops;
      trial.push_back({candidates[i]->id, candidates[i]->position});
      const double e = energy_of(trial);
      if (e > budget) continue;
      if (best == candidates.size() || e < best_energy ||
          (e == best_energy && candidates[i]->id < candidates[best]->id)) {
        best = i;
        best_energy = e;
      }
    }
    if (best == candidates.size()) break;
    stops.push_back({candidates[best]->id, candidates[best]->position});
    claim.route_energy_kwh = best_energy;
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
  }
  for (const Stop& s : stops) claim.customers.push_back(s.id);
  return claim;
}

int World::pending_in(Sector s) const {
  return static_cast<int>(std::count_if(state_.customers.begin(), state_.customers.end(), [&](const Customer& c) {
    return c.sector == s && c.status == CustomerStatus::kPending;
  }));
}

int World::unserved_in(Sector s) const {
  return static_cast<int>(std::count_if(state_.customers.begin(), state_.customers.end(), [&](const Customer& c) {
    return c.sector == s && c.status != CustomerStatus::kServed;
  }));
}

int World::drones_assigned_to(Sector s) const {
  return static_cast<int>(std::count_if(state_.drones.begin(), state_.drones.end(), [&](const DroneState& d) {
    return d.mode != DroneMode::kDepleted && d.sector_assignment == s;
  }));
}

int World::active_drone_count() const {
  return static_cast<int>(std::count_if(state_.drones.begin(), state_.drones.end(),
                                        [](const DroneState& d) { return d.mode != DroneMode::kDepleted; }));
}

int World::ideal_sector_share(Sector s) const {
  int total = 0;
  for (Sector k : kAllSectors) total += unserved_in(k);
  if (total == 0) return 0;
  const int n = active_drone_count();
  return (n * unserved_in(s) + total - 1) / total;
}

int World::served_count() const {
  return static_cast<int>(std::count_if(state_.customers.begin(), state_.customers.end(),
                                        [](const Customer& c) { return c.status == CustomerStatus::kServed; }));
}

int World::pending_count() const {
  return static_cast<int>(std::count_if(state_.customers.begin(), state_.customers.end(),
                                        [](const Customer& c) { return c.status == CustomerStatus::kPending; }));
}

int World::assigned_count() const {
  return static_cast<int>(std::count_if(state_.customers.begin(), state_.customers.end(),
                                        [](const Customer& c) { return c.status == CustomerStatus::kAssigned; }));
}

Event World::make_event(EventKind kind, DroneId drone, std::optional<CustomerId> customer,
                        std::string detail) const {
  return Event{kind, state_.t, drone, customer, std::move(detail)};
}

void World::debit(DroneState& d, double kwh) {
  d.soc = Soc(d.soc.fraction() - kwh / config_.battery.capacity_kwh);
  d.energy_consumed_kwh += kwh;
}

void World::move_toward(DroneState& d, Vec2 goal, DroneOutcome& out) {
  const double remaining = distance(d.position, goal);
  const double reach = config_.aircraft.cruise_speed * config_.grid.time_step;
  const double available = d.soc.fraction() * config_.battery.capacity_kwh;
  double travel = std::min(reach, remaining);
  double energy = travel * energy_per_meter_;
  bool depleted = false;
  if (energy >= available) {
    travel = available / energy_per_meter_;
    energy = available;
    depleted = true;
  }
  if (!depleted && remaining <= reach) {
    d.position = goal;  // snap on arrival
  } else if (remaining > 0.0) {
    d.position = d.position + travel * ((1.0 / remaining) * (goal - d.position));
  }
  d.cumulative_distance += travel;
  out.distance += travel;
  out.energy_kwh += energy;
  if (depleted) {
    d.energy_consumed_kwh += energy;
    d.soc = Soc(0.0);
    d.mode = DroneMode::kDepleted;
    d.target.reset();
    out.events.push_back(make_event(EventKind::kDepleted, d.id));
  } else {
    debit(d, energy);
  }
}

void World::start_charging_or_ground(DroneState& d, DroneOutcome& out) {
  d.target.reset();
  if (d.claimed.empty()) d.sector_assignment.reset();
  if (d.soc.fraction() < 1.0) {
    d.mode = DroneMode::kCharging;
    d.session_remaining_kwh = config_.battery.max_charge_per_journey_kwh;
  } else {
    d.mode = DroneMode::kGrounded;
  }
  (void)out;
}

void World::charge_tick(DroneState& d, DroneOutcome& out) {
  const double cap = config_.battery.capacity_kwh;
  const double headroom = (1.0 - d.soc.fraction()) * cap;
  const double gain = std::min({config_.battery.charger_power_kw * config_.grid.time_step / 3600.0,
                                d.session_remaining_kwh, headroom});
  d.soc = Soc(d.soc.fraction() + gain / cap);
  d.energy_charged_kwh += gain;
  d.session_remaining_kwh -= gain;
  if (d.session_remaining_kwh <= 1e-12 || d.soc.fraction() >= 1.0) {
    d.session_remaining_kwh = 0.0;
    d.mode = DroneMode::kGrounded;
    out.events.push_back(make_event(EventKind::kCharged, d.id));
  }
}

void World::arrive_at_customer(DroneState& d, CustomerId id, DroneOutcome& out) {
  Customer& c = state_.customers[static_cast<std::size_t>(id)];
  d.target.reset();
  const auto it = std::find(d.claimed.begin(), d.claimed.end(), id);
  if (it != d.claimed.end() && c.status == CustomerStatus::kAssigned && c.assigned_to == d.id) {
    c.status = CustomerStatus::kServed;
    d.claimed.erase(it);
    d.carried_packages = std::max(0, d.carried_packages - 1);
    ++out.deliveries;
    out.events.push_back(make_event(EventKind::kDelivered, d.id, id));
  } else if (c.status == CustomerStatus::kServed) {
    out.events.push_back(make_event(EventKind::kDuplicateArrival, d.id, id));
  } else {
    out.events.push_back(make_event(EventKind::kInvalidAction, d.id, id, "no package on board"));
  }
  if (d.claimed.empty()) {
    d.sector_assignment.reset();
    d.mode = DroneMode::kTransit;
  } else {
    d.mode = DroneMode::kDelivering;
  }
}

DroneOutcome World::apply(DroneId id, const Action& action) {
  DroneOutcome out;
  (void)drone(id);
  DroneState& d = state_.drones[static_cast<std::size_t>(id)];
  if (d.mode == DroneMode::kDepleted) return out;
  if (d.mode == DroneMode::kCharging) {
    charge_tick(d, out);
    return out;
  }
  out.acted = true;
  const Vec2 base = config_.grid.warehouse;
  const bool on_ground_at_base = d.position == base && d.mode == DroneMode::kGrounded;

  auto idle = [&] {
    if (on_ground_at_base) {
      start_charging_or_ground(d, out);
      return;
    }
    const double available = d.soc.fraction() * config_.battery.capacity_kwh;
    const double e = hover_energy(config_.grid.time_step, config_.aircraft);
    if (e >= available) {
      d.energy_consumed_kwh += available;
      out.energy_kwh += available;
      d.soc = Soc(0.0);
      d.mode = DroneMode::kDepleted;
      d.target.reset();
      out.events.push_back(make_event(EventKind::kDepleted, d.id));
    } else {
      debit(d, e);
      out.energy_kwh += e;
    }
  };

  switch (action.kind) {
    case ActionKind::kGoToSectorEast:
    case ActionKind::kGoToSectorWest:
    case ActionKind::kGoToSectorNorth:
    case ActionKind::kGoToSectorSouth: {
      if (!at_base(d)) {
        out.events.push_back(make_event(EventKind::kInvalidAction, d.id, std::nullopt,
                                        "sector command while not idle at the warehouse"));
        idle();
        break;
      }
      const Sector s = *action.target_sector();
      const SectorClaim claim = claim_for(id, s);
      if (claim.customers.empty()) {
        out.events.push_back(make_event(EventKind::kDispatched, d.id, std::nullopt,
                                        std::string(sector_name(s)) + ":empty"));
        break;
      }
      d.sector_assignment = s;
      d.claimed = claim.customers;
      d.carried_packages = static_cast<int>(claim.customers.size());
      for (CustomerId c : claim.customers) {
        Customer& cust = state_.customers[static_cast<std::size_t>(c)];
        cust.status = CustomerStatus::kAssigned;
        cust.assigned_to = d.id;
      }
      d.mode = DroneMode::kDelivering;
      out.events.push_back(make_event(EventKind::kDispatched, d.id, std::nullopt,
                                      std::string(sector_name(s))));
      break;
    }
    case ActionKind::kMoveToCustomer: {
      const Customer* cust = find_customer(action.customer);
      if (cust == nullptr) {
        out.events.push_back(make_event(EventKind::kInvalidAction, d.id, std::nullopt,
                                        "unknown customer " + std::to_string(action.customer)));
        idle();
        break;
      }
      if (on_ground_at_base && cust->status == CustomerStatus::kPending &&
          d.carried_packages < config_.aircraft.max_packages) {
        Customer& c = state_.customers[static_cast<std::size_t>(action.customer)];
        c.status = CustomerStatus::kAssigned;
        c.assigned_to = d.id;
        d.claimed.push_back(c.id);
        ++d.carried_packages;
        if (!d.sector_assignment) d.sector_assignment = c.sector;
      }
      d.mode = d.claimed.empty() ? DroneMode::kTransit : DroneMode::kDelivering;
      d.target = cust->position;
      move_toward(d, cust->position, out);
      if (d.mode != DroneMode::kDepleted && d.position == cust->position) {
        arrive_at_customer(d, action.customer, out);
      }
      break;
    }
    case ActionKind::kReturnToBase: {
      if (d.position == base) {
        start_charging_or_ground(d, out);
        break;
      }
      d.mode = DroneMode::kTransit;
      d.target = base;
      move_toward(d, base, out);
      if (d.mode != DroneMode::kDepleted && d.position == base) {
        out.events.push_back(make_event(EventKind::kLanded, d.id));
        start_charging_or_ground(d, out);
      }
      break;
    }
    case ActionKind::kGlobalIdle:
    case ActionKind::kLocalIdle:
    case ActionKind::kPass:
      idle();
      break;
  }
  out.reward = reward_of(config_.reward, out);
  return out;
}

void World::end_step() { ++state_.t; }

World::StepResult World::step(std::span<const Action> joint_actions) {
  if (joint_actions.size() != state_.drones.size()) {
    throw std::invalid_argument("step needs exactly one action per drone");
  }
  StepResult result;
  for (std::size_t i = 0; i < joint_actions.size(); ++i) {
    DroneOutcome o = apply(static_cast<DroneId>(i), joint_actions[i]);
    result.events.insert(result.events.end(), o.events.begin(), o.events.end());
    result.outcomes.push_back(std::move(o));
  }
  end_step();
  return result;
}

Observation World::observe(DroneId id) const {
  const DroneState& d = drone(id);
  const double h = config_.grid.half_extent;
  Observation o;
  o.normalized_position = {d.position.x / h, d.position.y / h};
  o.battery = d.soc.fraction();
  const double norm = std::max(1, state_.total_spawned);
  for (Sector s : kAllSectors) o.sector_pending[static_cast<std::size_t>(index_of(s))] = pending_in(s) / norm;
  o.sector_assignment.fill(0.0);
  o.sector_assignment[d.sector_assignment ? static_cast<std::size_t>(index_of(*d.sector_assignment))
                                          : static_cast<std::size_t>(kSectorCount)] = 1.0;
  const double max_distance =
      config_.aircraft.cruise_speed * config_.grid.time_step * config_.grid.max_steps;
  o.normalized_distance = std::min(1.0, d.cumulative_distance / max_distance);
  return o;
}

bool World::is_terminal() const {
  if (state_.t >= config_.grid.max_steps) return true;
  return std::none_of(state_.customers.begin(), state_.customers.end(),
                      [](const Customer& c) { return c.status != CustomerStatus::kServed; });
}

std::uint64_t layout_hash(const WorldState& state) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const Customer& c : state.customers) {
    mix(static_cast<std::uint64_t>(c.id));
    mix(std::bit_cast<std::uint64_t>(c.position.x));
    mix(std::bit_cast<std::uint64_t>(c.position.y));
    mix(static_cast<std::uint64_t>(index_of(c.sector)));
  }
  return h;
}

}  // namespace dronesafe
