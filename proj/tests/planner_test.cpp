#include <gtest/gtest.h>

#include <cmath>

#include "dronesafe/planner.hpp"

using namespace dronesafe;

namespace {

Customer customer(CustomerId id, Vec2 p, CustomerStatus status = CustomerStatus::kPending) {
  Customer c;
  c.id = id;
  c.position = p;
  c.sector = *sector_of(p);
  c.status = status;
  return c;
}

WorldState empty_state(int drones) {
  WorldState st;
  st.drones.resize(static_cast<std::size_t>(drones));
  for (int i = 0; i < drones; ++i) st.drones[static_cast<std::size_t>(i)].id = i;
  return st;
}

PlannerProposal ask(Planner& p, const World& w, DroneId id) { return p.propose(PlannerContext{w, id, {}}); }

}  // namespace

TEST(MockPlanner, SingleNonemptySector) {
  WorldState st = empty_state(10);
  for (int i = 0; i < 5; ++i) st.customers.push_back(customer(i, {100.0 + 20 * i, 5.0}));
  const World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  EXPECT_EQ(ask(m, w, 0).proposed, Action::go_to_sector(Sector::kEast));
}

TEST(MockPlanner, NothingPendingIdles) {
  const World w(WorldConfig::desk_scale(), empty_state(10));
  MockPlanner m;
  EXPECT_EQ(ask(m, w, 0).proposed, Action::global_idle());
}

TEST(MockPlanner, RatioRulePrefersUncrowdedSector) {
  WorldState st = empty_state(10);
  for (int i = 0; i < 4; ++i) st.customers.push_back(customer(i, {150.0 + 30 * i, 0.0}));
  for (int i = 4; i < 8; ++i) st.customers.push_back(customer(i, {0.0, 150.0 + 30 * (i - 4)}));
  st.drones[1].sector_assignment = Sector::kEast;
  st.drones[1].position = {50, 0};
  st.drones[1].mode = DroneMode::kTransit;
  const World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  EXPECT_EQ(ask(m, w, 0).proposed, Action::go_to_sector(Sector::kNorth));
}

TEST(MockPlanner, LocalFollowsRoute) {
  WorldState st = empty_state(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned), customer(1, {200, 0}, CustomerStatus::kAssigned)};
  st.drones[0].claimed = {1, 0};
  const World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  EXPECT_EQ(ask(m, w, 0).proposed, Action::move_to_customer(0));
}

TEST(MockPlanner, EmptyRouteReturns) {
  WorldState st = empty_state(1);
  st.drones[0].position = {120, 30};
  st.drones[0].mode = DroneMode::kTransit;
  const World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  EXPECT_EQ(ask(m, w, 0).proposed, Action::return_to_base());
}

TEST(MockPlanner, ReserveCutsRouteShort) {
  WorldState st = empty_state(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned), customer(1, {200, 0}, CustomerStatus::kAssigned),
                  customer(2, {450, 0}, CustomerStatus::kAssigned)};
  for (Customer& c : st.customers) c.assigned_to = 0;
  st.drones[0].claimed = {0, 1, 2};
  st.drones[0].carried_packages = 3;
  st.drones[0].soc = Soc(0.45);
  World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  std::vector<Action> distinct;
  for (int step = 0; step < 50 && w.tier_of(0) == Tier::kLocal && w.drone(0).mode != DroneMode::kCharging; ++step) {
    const Action a = ask(m, w, 0).proposed;
    if (distinct.empty() || !(distinct.back() == a)) distinct.push_back(a);
    w.apply(0, a);
    w.end_step();
  }
  const std::vector<Action> want{Action::move_to_customer(0), Action::move_to_customer(1), Action::return_to_base()};
  EXPECT_EQ(distinct, want);
  EXPECT_EQ(w.find_customer(2)->status, CustomerStatus::kAssigned);
  EXPECT_NE(w.drone(0).mode, DroneMode::kDepleted);
}

TEST(MockPlanner, KeepsUnreachedTargetFromMemory) {
  WorldState st = empty_state(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned), customer(1, {-300, 0}, CustomerStatus::kServed)};
  st.drones[0].claimed = {0};
  st.drones[0].position = {10, 0};
  st.drones[0].mode = DroneMode::kDelivering;
  st.t = 5;
  const World w(WorldConfig::desk_scale(), st);
  MockPlanner m;
  std::vector<PlannerRecord> mem{{0, 4, {}, Action::move_to_customer(1), false, std::nullopt}};
  EXPECT_EQ(m.propose(PlannerContext{w, 0, mem}).proposed, Action::move_to_customer(1));
  mem[0].override_flag = true;
  EXPECT_EQ(m.propose(PlannerContext{w, 0, mem}).proposed, Action::move_to_customer(0));
}

TEST(FaultInjection, ZeroRatesAreIdentity) {
  WorldState st = empty_state(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed)};
  st.drones[0].position = {50, 0};
  const World w(WorldConfig::desk_scale(), st);
  Rng rng(1);
  MockPlanner m;
  const PlannerProposal p = ask(m, w, 0);
  for (int i = 0; i < 100; ++i) {
    const PlannerProposal q = inject_fault(p, PlannerContext{w, 0, {}}, FaultConfig::none(), rng);
    EXPECT_EQ(q.proposed, p.proposed);
    EXPECT_FALSE(q.injected_fault);
  }
}

TEST(FaultInjection, ForcedDuplicateTargetsServedCustomer) {
  WorldState st = empty_state(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed), customer(1, {0, 100}, CustomerStatus::kAssigned)};
  st.drones[0].claimed = {1};
  st.drones[0].position = {50, 50};
  const World w(WorldConfig::desk_scale(), st);
  Rng rng(2);
  MockPlanner m;
  FaultConfig f = FaultConfig::none();
  f.duplicate_visit = 1.0;
  const PlannerProposal q = inject_fault(ask(m, w, 0), PlannerContext{w, 0, {}}, f, rng);
  EXPECT_EQ(q.proposed, Action::move_to_customer(0));
  EXPECT_EQ(q.injected_fault, FaultClass::kDuplicateVisit);
}

TEST(FaultInjection, ClassSharesFollowRates) {
  const FaultConfig f;
  Rng rng(2024);
  std::array<int, 4> counts{};
  int corrupted = 0;
  for (int i = 0; i < 10000; ++i) {
    if (const auto c = draw_fault(f, rng)) {
      ++counts[static_cast<std::size_t>(*c)];
      ++corrupted;
    }
  }
  ASSERT_GT(corrupted, 0);
  const std::array<double, 4> want{0.64, 0.24, 0.08, 0.04};
  for (std::size_t k = 0; k < 4; ++k) {
    const double share = static_cast<double>(counts[k]) / corrupted;
    const double sigma = std::sqrt(want[k] * (1 - want[k]) / corrupted);
    EXPECT_NEAR(share, want[k], 3.0 * sigma) << fault_name(static_cast<FaultClass>(k));
  }
}

TEST(FaultInjection, ConfigValidation) {
  FaultConfig f;
  f.duplicate_visit = 0.9;
  f.battery_ignore = 0.2;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f = FaultConfig{};
  f.sector_imbalance = -0.1;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(FaultInjection, StreamsArePerDrone) {
  const World w(WorldConfig::desk_scale(), 17);
  FaultConfig f = FaultConfig::none();
  f.sector_imbalance = 0.5;
  FaultInjectingPlanner a(std::make_unique<MockPlanner>(), f, 10);
  FaultInjectingPlanner b(std::make_unique<MockPlanner>(), f, 10);
  a.reset(5);
  b.reset(5);
  std::vector<bool> with_other;
  std::vector<bool> alone;
  for (int i = 0; i < 50; ++i) {
    a.propose(PlannerContext{w, 0, {}});
    with_other.push_back(a.propose(PlannerContext{w, 3, {}}).injected_fault.has_value());
    alone.push_back(b.propose(PlannerContext{w, 3, {}}).injected_fault.has_value());
  }
  EXPECT_EQ(with_other, alone);
}
