#include <gtest/gtest.h>

#include <cmath>

#include "dronesafe/energy.hpp"
#include "dronesafe/planner.hpp"
#include "dronesafe/safety.hpp"

using namespace dronesafe;

namespace {

Customer customer(CustomerId id, Vec2 p, CustomerStatus status, std::optional<DroneId> owner = std::nullopt) {
  Customer c;
  c.id = id;
  c.position = p;
  c.sector = *sector_of(p);
  c.status = status;
  c.assigned_to = owner;
  return c;
}

WorldState state_with(int drones) {
  WorldState st;
  st.drones.resize(static_cast<std::size_t>(drones));
  for (int i = 0; i < drones; ++i) st.drones[static_cast<std::size_t>(i)].id = i;
  return st;
}

class FixedScorer : public ActionScorer {
 public:
  explicit FixedScorer(std::array<double, kPolicySlotCount> s) : s_(s) {}
  std::array<double, kPolicySlotCount> score(const Observation&) const override { return s_; }

 private:
  std::array<double, kPolicySlotCount> s_;
};

}  // namespace

TEST(Constraints, ServedTargetIsDuplicate) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed)};
  st.drones[0].position = {20, 0};
  const World w(WorldConfig::desk_scale(), st);
  const ConstraintReport r = evaluate_constraints(w, 0, Action::move_to_customer(0), {});
  EXPECT_EQ(r.g[1], 1.0);
  EXPECT_EQ(r.worst(), Constraint::kDuplicate);
  EXPECT_EQ(r.g[2], -1.0);
}

TEST(Constraints, OtherDronesCustomerIsDuplicate) {
  WorldState st = state_with(2);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned, 1), customer(1, {0, 80}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {1};
  st.drones[1].claimed = {0};
  const World w(WorldConfig::desk_scale(), st);
  EXPECT_EQ(evaluate_constraints(w, 0, Action::move_to_customer(0), {}).g[1], 1.0);
  EXPECT_EQ(evaluate_constraints(w, 0, Action::move_to_customer(1), {}).g[1], -1.0);
  EXPECT_EQ(evaluate_constraints(w, 0, Action::move_to_customer(42), {}).g[1], 1.0);
}

TEST(Constraints, IdleAtBaseIsSafe) {
  const World w(WorldConfig::desk_scale(), 4);
  const ConstraintReport r = evaluate_constraints(w, 0, Action::global_idle(), {});
  for (double g : r.g) EXPECT_LE(g, 0.0);
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_TRUE(r.feasible());
}

TEST(Constraints, BatteryMargin) {
  const WorldConfig cfg = WorldConfig::desk_scale();
  // Out-and-back leg costing exactly 15 % of the pack.
  const double d = 0.15 * cfg.battery.capacity_kwh / energy_per_meter(cfg.aircraft) / 2.0;
  WorldState st = state_with(1);
  st.customers = {customer(0, {d, 0}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {0};
  st.drones[0].soc = Soc(0.20);
  const World w(cfg, st);
  const ConstraintReport r = evaluate_constraints(w, 0, Action::move_to_customer(0), {});
  EXPECT_NEAR(r.g[0], 0.05, 1e-12);
  EXPECT_EQ(r.worst(), Constraint::kBattery);
  EXPECT_NEAR(r.cost, 0.05, 1e-12);
}

TEST(Constraints, RouteSlack) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned, 0), customer(1, {0, 100}, CustomerStatus::kAssigned, 0),
                  customer(2, {-100, 0}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {0, 1, 2};
  const World w(WorldConfig::desk_scale(), st);
  EXPECT_LT(evaluate_constraints(w, 0, Action::move_to_customer(0), {}).g[2], 0.0);
  const double diag = 100.0 * std::sqrt(2.0);
  const double optimal = 200.0 + 2.0 * diag;
  const double via_middle = 100.0 + diag + 200.0 + 100.0;
  const ConstraintReport bad = evaluate_constraints(w, 0, Action::move_to_customer(1), {});
  EXPECT_NEAR(bad.g[2], via_middle / (1.05 * optimal) - 1.0, 1e-9);
  EXPECT_GT(bad.g[2], 0.0);
}

TEST(Constraints, DisabledConstraintIsIgnored) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed)};
  const World w(WorldConfig::desk_scale(), st);
  ConstraintConfig c;
  c.enabled[1] = false;
  EXPECT_FALSE(evaluate_constraints(w, 0, Action::move_to_customer(0), c).worst() == Constraint::kDuplicate);
}

TEST(Filter, SafePassesThrough) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {0};
  const World w(WorldConfig::desk_scale(), st);
  const OverrideOutcome o = filter_action(w, 0, Action::move_to_customer(0), FallbackSource::ladder(), {});
  EXPECT_FALSE(o.overridden);
  EXPECT_EQ(o.executed, Action::move_to_customer(0));
}

TEST(Filter, BatteryViolationReturnsHome) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {450, 0}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {0};
  st.drones[0].position = {100, 0};
  st.drones[0].mode = DroneMode::kDelivering;
  st.drones[0].soc = Soc(0.3);
  const World w(WorldConfig::desk_scale(), st);
  const OverrideOutcome o = filter_action(w, 0, Action::move_to_customer(0), FallbackSource::ladder(), {});
  EXPECT_TRUE(o.overridden);
  EXPECT_EQ(o.fault_class, HallucinationClass::kBattery);
  EXPECT_EQ(o.executed, Action::return_to_base());
}

TEST(Filter, DuplicateFallsBackToRemainingCustomer) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed), customer(1, {0, 120}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {1};
  st.drones[0].position = {100, 0};
  st.drones[0].mode = DroneMode::kDelivering;
  const World w(WorldConfig::desk_scale(), st);
  const OverrideOutcome o = filter_action(w, 0, Action::move_to_customer(0), FallbackSource::ladder(), {});
  EXPECT_EQ(o.fault_class, HallucinationClass::kDuplicate);
  EXPECT_EQ(o.executed, Action::move_to_customer(1));
}

TEST(Filter, PolicyModeTakesArgmax) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kAssigned, 0)};
  st.drones[0].claimed = {0};
  st.drones[0].position = {30, 0};
  st.drones[0].mode = DroneMode::kDelivering;
  const World w(WorldConfig::desk_scale(), st);
  std::array<double, kPolicySlotCount> s{};
  s.fill(-100.0);
  s[static_cast<std::size_t>(PolicySlot::kIdle)] = 1.0;
  s[static_cast<std::size_t>(PolicySlot::kReturnToBase)] = 2.0;
  const FixedScorer scorer(s);
  const OverrideOutcome o = filter_action(w, 0, Action::pass(), FallbackSource::policy(scorer), {});
  EXPECT_TRUE(o.overridden);
  EXPECT_EQ(o.fault_class, HallucinationClass::kPass);
  EXPECT_EQ(o.executed, Action::return_to_base());
}

TEST(Filter, ParseFailureLabel) {
  const World w(WorldConfig::desk_scale(), 2);
  const OverrideOutcome o = filter_action(w, 0, Action::pass(), FallbackSource::ladder(), {}, true, true);
  EXPECT_EQ(o.fault_class, HallucinationClass::kParseFailure);
  EXPECT_FALSE(o.executed.is_pass());
}

TEST(Filter, EvaluateOnlyModeExecutesProposal) {
  WorldState st = state_with(1);
  st.customers = {customer(0, {100, 0}, CustomerStatus::kServed)};
  st.drones[0].position = {10, 0};
  st.drones[0].mode = DroneMode::kTransit;
  const World w(WorldConfig::desk_scale(), st);
  const OverrideOutcome o = filter_action(w, 0, Action::move_to_customer(0), FallbackSource::ladder(), {}, false);
  EXPECT_FALSE(o.overridden);
  EXPECT_EQ(o.executed, Action::move_to_customer(0));
  EXPECT_FALSE(o.report.feasible());
  EXPECT_EQ(filter_action(w, 0, Action::pass(), FallbackSource::ladder(), {}, false).executed, Action::local_idle());
}

TEST(Filter, PassFallbackIsAlwaysFeasible) {
  int states = 0;
  for (std::uint64_t seed = 1; states < 1000; ++seed) {
    World w(WorldConfig::desk_scale(), seed);
    FaultInjectingPlanner planner(std::make_unique<MockPlanner>(), FaultConfig{}, 10);
    planner.reset(seed);
    while (!w.is_terminal() && states < 1000) {
      for (DroneId id = 0; id < 10; ++id) {
        if (!w.needs_decision(id)) {
          w.apply(id, Action::local_idle());
          continue;
        }
        const OverrideOutcome pass = filter_action(w, id, Action::pass(), FallbackSource::ladder(), {});
        EXPECT_FALSE(pass.executed.is_pass());
        EXPECT_TRUE(evaluate_constraints(w, id, pass.executed, {}).feasible());
        ++states;
        const PlannerProposal p = planner.propose(PlannerContext{w, id, {}});
        w.apply(id, filter_action(w, id, p.proposed, FallbackSource::ladder(), {}).executed);
      }
      w.end_step();
    }
  }
}

TEST(Audit, Shares) {
  EXPECT_EQ(audit({}).shares(), (std::array<double, kHallucinationClassCount>{}));
  std::array<long, kHallucinationClassCount> counts{};
  counts[static_cast<std::size_t>(HallucinationClass::kDuplicate)] = 64;
  counts[static_cast<std::size_t>(HallucinationClass::kBattery)] = 24;
  counts[static_cast<std::size_t>(HallucinationClass::kRoute)] = 8;
  counts[static_cast<std::size_t>(HallucinationClass::kSector)] = 4;
  const auto s = audit(counts).shares();
  EXPECT_DOUBLE_EQ(s[static_cast<std::size_t>(HallucinationClass::kDuplicate)], 0.64);
  EXPECT_DOUBLE_EQ(s[static_cast<std::size_t>(HallucinationClass::kBattery)], 0.24);
  EXPECT_DOUBLE_EQ(s[static_cast<std::size_t>(HallucinationClass::kRoute)], 0.08);
  EXPECT_DOUBLE_EQ(s[static_cast<std::size_t>(HallucinationClass::kSector)], 0.04);
  double sum = 0.0;
  for (double v : s) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Audit, WorstTieBreak) {
  ConstraintReport r;
  r.g = {0.5, 0.5, -1.0, 0.5};
  r.violated = {Constraint::kBattery, Constraint::kDuplicate, Constraint::kSector};
  EXPECT_EQ(r.worst(), Constraint::kBattery);
  r.g = {-1.0, 0.2, 0.2, 0.3};
  r.violated = {Constraint::kDuplicate, Constraint::kRoute, Constraint::kSector};
  EXPECT_EQ(r.worst(), Constraint::kSector);
}
