#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dronesafe/action.hpp"
#include "dronesafe/energy.hpp"
#include "dronesafe/geometry.hpp"
#include "dronesafe/routing.hpp"

namespace dronesafe {

using Rng = std::mt19937_64;

struct GridConfig {
  double half_extent = 500.0;  // grid is [-half_extent, half_extent]^2
  Vec2 warehouse{0.0, 0.0};
  double time_step = 1.0;  // s
  int max_steps = 300;
  int drone_count = 10;

  void validate() const;
};

struct SpawnConfig {
  // Per-sector customer count, uniform over [min, max].
  int min_per_sector = 3;
  int max_per_sector = 7;

  void validate() const;
};

struct RewardWeights {
  double delivery = 10.0;  // per package delivered
  double distance = 0.002;  // per metre flown
  double battery = 0.05;   // per kWh consumed
};

struct WorldConfig {
  GridConfig grid;
  SpawnConfig spawn;
  RewardWeights reward;
  AircraftParams aircraft;
  BatteryModel battery;

  void validate() const;
  // Reference constants with the 2 kWh desk-scale battery.
  static WorldConfig desk_scale();
};

enum class CustomerStatus { kPending, kAssigned, kServed };

struct Customer {
  CustomerId id = -1;
  Vec2 position;
  Sector sector = Sector::kEast;
  CustomerStatus status = CustomerStatus::kPending;
  std::optional<DroneId> assigned_to;
};

enum class DroneMode { kGrounded, kTransit, kDelivering, kCharging, kDepleted };

std::string_view mode_name(DroneMode mode);

struct DroneState {
  DroneId id = 0;
  Vec2 position;
  Soc soc{1.0};
  int carried_packages = 0;
  DroneMode mode = DroneMode::kGrounded;
  std::optional<Vec2> target;
  double cumulative_distance = 0.0;
  std::optional<Sector> sector_assignment;
  // Customers whose packages are on board, in claim order.
  std::vector<CustomerId> claimed;
  double energy_consumed_kwh = 0.0;
  double energy_charged_kwh = 0.0;
  // Charge still owed by the current charging session.
  double session_remaining_kwh = 0.0;
};

struct WorldState {
  int t = 0;
  std::uint64_t seed = 0;
  std::vector<DroneState> drones;
  std::vector<Customer> customers;
  int total_spawned = 0;
  Rng rng;
};

// Flat feature vector handed to planners, the policy and the critics.
struct Observation {
  std::array<double, 2> normalized_position{};
  double battery = 1.0;
  std::array<double, kSectorCount> sector_pending{};
  std::array<double, kSectorCount + 1> sector_assignment{};  // last slot: none
  double normalized_distance = 0.0;

  static constexpr int kSize = 2 + 1 + kSectorCount + kSectorCount + 1 + 1;
  Eigen::VectorXd to_vector() const;
  static Observation from_vector(const Eigen::VectorXd& v);
  bool has_assignment() const { return sector_assignment[kSectorCount] < 0.5; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

enum class EventKind {
  kDelivered,
  kDepleted,
  kCharged,
  kLanded,
  kDispatched,
  kDuplicateArrival,
  kInvalidAction,
  kOverridden,
  kPlannerFallback,
};

std::string_view event_name(EventKind kind);

struct Event {
  EventKind kind = EventKind::kDelivered;
  int t = 0;
  DroneId drone = 0;
  std::optional<CustomerId> customer;
  std::string detail;
};

// What one drone's action did during a step.
struct DroneOutcome {
  int deliveries = 0;
  double distance = 0.0;    // m
  double energy_kwh = 0.0;  // consumed
  double reward = 0.0;
  bool acted = false;  // false for charging or depleted drones
  std::vector<Event> events;
};

double reward_of(const RewardWeights& weights, const DroneOutcome& outcome);

std::vector<Customer> spawn_customers(Rng& rng, const SpawnConfig& spawn, const GridConfig& grid);

// Customers a go_to_sector dispatch would load, plus the energy of flying
// them: farthest pending customer first, then cheapest insertions while the
// whole round trip stays within the charge above the reserve.
struct SectorClaim {
  std::vector<CustomerId> customers;
  double route_energy_kwh = 0.0;
  bool within_budget = true;
};

class World {
 public:
  World(WorldConfig config, std::uint64_t seed);
  // Adopt an explicitly constructed state (tests, restored snapshots).
  World(WorldConfig config, WorldState state);

  static WorldState init_episode(std::uint64_t seed, const WorldConfig& config);

  const WorldConfig& config() const { return config_; }
  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }

  const DroneState& drone(DroneId id) const;
  const Customer* find_customer(CustomerId id) const;

  // Drone is at the warehouse, on the ground, with nothing on board.
  bool at_base(const DroneState& d) const;
  Tier tier_of(DroneId id) const;
  // Charging and depleted drones take no decisions.
  bool needs_decision(DroneId id) const;

  // Apply one drone's action for the current step. Charging drones keep
  // charging and depleted drones stay put whatever the action.
  DroneOutcome apply(DroneId id, const Action& action);
  // Advance the clock after every drone has acted.
  void end_step();

  struct StepResult {
    std::vector<DroneOutcome> outcomes;
    std::vector<Event> events;
  };
  // Applies joint_actions[i] to drone i in id order, then ends the step.
  StepResult step(std::span<const Action> joint_actions);

  Observation observe(DroneId id) const;
  bool is_terminal() const;

  // --- queries shared by planners and the safety layer ---
  std::vector<Stop> claimed_stops(DroneId id) const;
  // Optimal visiting order over the drone's remaining claims, with return.
  Route optimal_route(DroneId id) const;
  SectorClaim claim_for(DroneId id, Sector sector) const;
  int pending_in(Sector s) const;
  int unserved_in(Sector s) const;
  int drones_assigned_to(Sector s) const;
  int active_drone_count() const;
  // ceil(active drones * unserved_k / total unserved); 0 when nothing is left.
  int ideal_sector_share(Sector s) const;
  int served_count() const;
  int pending_count() const;
  int assigned_count() const;
  double energy_to_base(Vec2 from) const;
  double energy_between(Vec2 a, Vec2 b) const;

 private:
  void move_toward(DroneState& d, Vec2 goal, DroneOutcome& out);
  void start_charging_or_ground(DroneState& d, DroneOutcome& out);
  void charge_tick(DroneState& d, DroneOutcome& out);
  void debit(DroneState& d, double kwh);
  void arrive_at_customer(DroneState& d, CustomerId id, DroneOutcome& out);
  Event make_event(EventKind kind, DroneId drone, std::optional<CustomerId> customer = std::nullopt,
                   std::string detail = {}) const;

  WorldConfig config_;
  WorldState state_;
  double energy_per_meter_ = 0.0;
};

// FNV-1a over the customer layout; equal hashes mean identical layouts.
std::uint64_t layout_hash(const WorldState& state);

}  // namespace dronesafe
