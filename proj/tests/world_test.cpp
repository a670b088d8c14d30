#include <gtest/gtest.h>

#include <cmath>

#include "dronesafe/world.hpp"

using namespace dronesafe;

namespace {

// One drone at the warehouse carrying customer 0 at (100, 0).
World one_delivery_world() {
  WorldConfig cfg = WorldConfig::desk_scale();
  cfg.grid.drone_count = 1;
  WorldState st;
  st.drones.resize(1);
  Customer c;
  c.id = 0;
  c.position = {100, 0};
  c.sector = Sector::kEast;
  c.status = CustomerStatus::kAssigned;
  c.assigned_to = 0;
  st.customers.push_back(c);
  st.drones[0].claimed = {0};
  st.drones[0].carried_packages = 1;
  st.drones[0].sector_assignment = Sector::kEast;
  return World(cfg, st);
}

}  // namespace

TEST(World, InitialState) {
  const World w(WorldConfig{}, 42);
  ASSERT_EQ(w.state().drones.size(), 10U);
  for (const DroneState& d : w.state().drones) {
    EXPECT_EQ(d.position, (Vec2{0, 0}));
    EXPECT_EQ(d.soc.fraction(), 1.0);
  }
  const World again(WorldConfig{}, 42);
  EXPECT_EQ(layout_hash(w.state()), layout_hash(again.state()));
  const World other(WorldConfig{}, 43);
  EXPECT_NE(layout_hash(w.state()), layout_hash(other.state()));
}

TEST(World, FixedSpawnCount) {
  Rng rng(1);
  const auto c = spawn_customers(rng, {5, 5}, GridConfig{});
  ASSERT_EQ(c.size(), 20U);
  for (Sector s : kAllSectors) {
    EXPECT_EQ(std::count_if(c.begin(), c.end(), [s](const Customer& x) { return x.sector == s; }), 5);
  }
  for (const Customer& x : c) EXPECT_EQ(sector_of(x.position), x.sector);
  EXPECT_TRUE(spawn_customers(rng, {0, 0}, GridConfig{}).empty());
}

TEST(World, EastSpawnCentroid) {
  Rng rng(7);
  double sx = 0.0;
  double sy = 0.0;
  int n = 0;
  while (n < 10000) {
    for (const Customer& c : spawn_customers(rng, {10, 10}, GridConfig{})) {
      if (c.sector != Sector::kEast || n >= 10000) continue;
      sx += c.position.x;
      sy += c.position.y;
      ++n;
    }
  }
  // Centroid of the triangle (0,0), (h,h), (h,-h).
  EXPECT_NEAR(sx / n, 2.0 * 500.0 / 3.0, 0.02 * 500.0);
  EXPECT_NEAR(sy / n, 0.0, 0.02 * 500.0);
}

TEST(World, MoveThenDeliver) {
  World w = one_delivery_world();
  DroneOutcome o = w.apply(0, Action::move_to_customer(0));
  w.end_step();
  EXPECT_EQ(w.drone(0).position, (Vec2{73.762, 0}));
  EXPECT_EQ(o.deliveries, 0);
  o = w.apply(0, Action::move_to_customer(0));
  w.end_step();
  EXPECT_EQ(w.drone(0).position, (Vec2{100, 0}));
  EXPECT_EQ(o.deliveries, 1);
  EXPECT_NEAR(o.distance, 26.238, 1e-9);
  EXPECT_EQ(w.find_customer(0)->status, CustomerStatus::kServed);
  EXPECT_TRUE(w.is_terminal());
}

TEST(World, GroundedIdleCostsNothing) {
  World w(WorldConfig::desk_scale(), 3);
  std::vector<Action> idle(10, Action::global_idle());
  const auto r = w.step(idle);
  for (const DroneOutcome& o : r.outcomes) {
    EXPECT_EQ(o.energy_kwh, 0.0);
    EXPECT_EQ(o.reward, 0.0);
  }
  for (const DroneState& d : w.state().drones) EXPECT_EQ(d.position, (Vec2{0, 0}));
  EXPECT_THROW(w.step(std::vector<Action>(3, Action::global_idle())), std::invalid_argument);
}

TEST(World, RewardFormula) {
  DroneOutcome o;
  o.deliveries = 1;
  o.distance = 100.0;
  o.energy_kwh = 0.073;
  EXPECT_NEAR(reward_of(RewardWeights{}, o), 10.0 - 0.2 - 0.00365, 1e-12);
  RewardWeights doubled;
  doubled.delivery = 20.0;
  EXPECT_NEAR(reward_of(doubled, o) - reward_of(RewardWeights{}, o), 10.0, 1e-12);
}

TEST(World, UnknownCustomerIsRejectedWithEvent) {
  World w = one_delivery_world();
  const DroneOutcome o = w.apply(0, Action::move_to_customer(99));
  ASSERT_FALSE(o.events.empty());
  EXPECT_EQ(o.events.front().kind, EventKind::kInvalidAction);
}

TEST(World, Observation) {
  World w(WorldConfig{}, 5);
  Observation o = w.observe(0);
  EXPECT_EQ(o.normalized_position[0], 0.0);
  EXPECT_EQ(o.battery, 1.0);
  EXPECT_FALSE(o.has_assignment());
  EXPECT_EQ(Observation::from_vector(o.to_vector()), o);

  w.mutable_state().drones[0].position = {500, -500};
  o = w.observe(0);
  EXPECT_EQ(o.normalized_position[0], 1.0);
  EXPECT_EQ(o.normalized_position[1], -1.0);
}

TEST(World, PendingShare) {
  WorldConfig cfg;
  WorldState st;
  st.drones.resize(10);
  for (int i = 0; i < 20; ++i) {
    Customer c;
    c.id = i;
    c.sector = i < 5 ? Sector::kEast : Sector::kNorth;
    c.position = i < 5 ? Vec2{100, 0} : Vec2{0, 100};
    st.customers.push_back(c);
  }
  const World w(cfg, st);
  EXPECT_DOUBLE_EQ(w.observe(0).sector_pending[0], 0.25);
}

TEST(World, Termination) {
  World w(WorldConfig{}, 9);
  EXPECT_FALSE(w.is_terminal());
  w.mutable_state().t = 300;
  EXPECT_TRUE(w.is_terminal());
  World served(WorldConfig{}, 9);
  for (Customer& c : served.mutable_state().customers) c.status = CustomerStatus::kServed;
  served.mutable_state().t = 120;
  EXPECT_TRUE(served.is_terminal());
}

TEST(World, DispatchClaimsAndCharging) {
  World w(WorldConfig::desk_scale(), 11);
  const SectorClaim claim = w.claim_for(0, Sector::kEast);
  ASSERT_FALSE(claim.customers.empty());
  EXPECT_TRUE(claim.within_budget);
  EXPECT_LE(claim.customers.size(), 4U);
  w.apply(0, Action::go_to_sector(Sector::kEast));
  EXPECT_EQ(w.drone(0).claimed, claim.customers);
  EXPECT_EQ(w.tier_of(0), Tier::kLocal);
  EXPECT_EQ(w.drones_assigned_to(Sector::kEast), 1);

  // Fly the route, come home, and start a charge session.
  for (int step = 0; step < 200 && w.drone(0).mode != DroneMode::kCharging; ++step) {
    const Route r = w.optimal_route(0);
    w.apply(0, r.stops.empty() ? Action::return_to_base() : Action::move_to_customer(r.stops.front()));
    w.end_step();
  }
  EXPECT_EQ(w.drone(0).mode, DroneMode::kCharging);
  EXPECT_GT(w.drone(0).energy_consumed_kwh, 0.0);
  const double before = w.drone(0).soc.fraction();
  w.apply(0, Action::global_idle());
  EXPECT_GT(w.drone(0).soc.fraction(), before);
}

TEST(World, DepletionStopsPartway) {
  World w = one_delivery_world();
  w.mutable_state().drones[0].soc = Soc(0.01);
  const DroneOutcome o = w.apply(0, Action::move_to_customer(0));
  EXPECT_EQ(w.drone(0).mode, DroneMode::kDepleted);
  EXPECT_LT(w.drone(0).position.x, 73.762);
  EXPECT_EQ(w.drone(0).soc.fraction(), 0.0);
  EXPECT_NEAR(o.energy_kwh, 0.02, 1e-12);
  EXPECT_FALSE(w.needs_decision(0));
}
