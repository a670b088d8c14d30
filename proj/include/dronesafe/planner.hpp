#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dronesafe/action.hpp"
#include "dronesafe/replay.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

enum class ProposalSource { kMock, kLlm };

enum class FaultClass { kDuplicateVisit = 0, kBatteryIgnore = 1, kInefficientRoute = 2, kSectorImbalance = 3 };
inline constexpr int kFaultClassCount = 4;

std::string_view fault_name(FaultClass f);

struct PlannerProposal {
  DroneId drone = 0;
  Action proposed;
  Tier tier = Tier::kGlobal;
  ProposalSource source = ProposalSource::kMock;
  std::optional<std::string> raw_text;  // llm responses only
  // Ground-truth label set by inject_fault.
  std::optional<FaultClass> injected_fault;
  // What the planner would have proposed had it ignored the battery; set
  // only when a reserve check replaced that action.
  std::optional<Action> battery_unconstrained;
  bool parse_failure = false;
  bool endpoint_fallback = false;
};

struct FaultConfig {
  double duplicate_visit = 0.064;
  double battery_ignore = 0.024;
  double inefficient_route = 0.008;
  double sector_imbalance = 0.004;

  void validate() const;
  double total() const { return duplicate_visit + battery_ignore + inefficient_route + sector_imbalance; }
  static FaultConfig none() { return {0.0, 0.0, 0.0, 0.0}; }
};

struct PlannerContext {
  const World& world;
  DroneId drone;
  // Recent planner records, newest last.
  std::span<const PlannerRecord> memory;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual PlannerProposal propose(const PlannerContext& ctx) = 0;
  // Called once per episode before the first proposal.
  virtual void reset(std::uint64_t /*episode_seed*/) {}
};

// Deterministic reference planner. Global tier: the sector maximising
// pending / (assigned drones + 1) among sectors it can serve safely. Local
// tier: the next stop of the optimal route, keeping a previous target it
// has not reached yet, or return_to_base when the reserve would be breached.
class MockPlanner : public Planner {
 public:
  struct Options {
    double sector_tolerance = 1.0;
  };

  MockPlanner() = default;
  explicit MockPlanner(Options options) : options_(options) {}

  PlannerProposal propose(const PlannerContext& ctx) override;
  PlannerProposal propose_global(const PlannerContext& ctx) const;
  PlannerProposal propose_local(const PlannerContext& ctx) const;

 private:
  Options options_;
};

// Draws at most one fault class with one uniform variate.
std::optional<FaultClass> draw_fault(const FaultConfig& config, Rng& rng);

// Corrupts the proposal per the drawn class when that corruption applies
// to the drone's situation; otherwise returns it unchanged and unlabelled.
PlannerProposal inject_fault(PlannerProposal proposal, const PlannerContext& ctx,
                             const FaultConfig& config, Rng& rng);

// Wraps a planner and corrupts its proposals. Each drone draws from its own
// stream so results do not depend on query order across drones.
class FaultInjectingPlanner : public Planner {
 public:
  FaultInjectingPlanner(std::unique_ptr<Planner> inner, FaultConfig config, int drone_count);

  void reset(std::uint64_t episode_seed) override;
  PlannerProposal propose(const PlannerContext& ctx) override;

 private:
  std::unique_ptr<Planner> inner_;
  FaultConfig config_;
  std::vector<Rng> streams_;
};

}  // namespace dronesafe
