#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dronesafe/action.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

enum class Constraint { kBattery = 0, kDuplicate = 1, kRoute = 2, kSector = 3 };
inline constexpr int kConstraintCount = 4;
// Also the tie-break priority when picking a fault class.
inline constexpr std::array<Constraint, kConstraintCount> kAllConstraints = {
    Constraint::kBattery, Constraint::kDuplicate, Constraint::kRoute, Constraint::kSector};

std::string_view constraint_name(Constraint c);
HallucinationClass to_hallucination(Constraint c);

struct ConstraintConfig {
  double battery_reserve = 0.10;  // SOC fraction kept after the return leg
  double route_slack = 0.05;      // epsilon over the optimal route cost
  double sector_tolerance = 1.0;  // drones allowed above the ideal share
  std::array<bool, kConstraintCount> enabled{true, true, true, true};

  void validate() const;
};

struct ConstraintReport {
  std::array<double, kConstraintCount> g{-1.0, -1.0, -1.0, -1.0};
  double cost = 0.0;  // sum of max(0, g_k)
  std::vector<Constraint> violated;

  bool feasible() const { return violated.empty(); }
  double hinge(Constraint c) const;
  std::array<double, kConstraintCount> hinge_costs() const;
  // Violated constraint with the largest g; ties follow kAllConstraints order.
  std::optional<Constraint> worst() const;
};

// kWh the action needs to complete plus the leg home afterwards.
double committed_energy(const World& world, DroneId drone, const Action& action);

ConstraintReport evaluate_constraints(const World& world, DroneId drone, const Action& action,
                                      const ConstraintConfig& config);

// Scores a policy slot for the critic-driven fallback (Q - lambda^T Q_c).
class ActionScorer {
 public:
  virtual ~ActionScorer() = default;
  virtual std::array<double, kPolicySlotCount> score(const Observation& obs) const = 0;
};

struct FallbackSource {
  enum class Kind { kLadder, kPolicy };
  Kind kind = Kind::kLadder;
  const ActionScorer* scorer = nullptr;

  static FallbackSource ladder() { return {}; }
  static FallbackSource policy(const ActionScorer& s) { return {Kind::kPolicy, &s}; }
};

// Concrete action for a policy slot in the drone's current situation, or
// nullopt when the slot does not apply (wrong tier, nothing left to visit).
std::optional<Action> action_for_slot(const World& world, DroneId drone, PolicySlot slot);
// Bit i set when slot i resolves to an action.
std::uint8_t applicable_slots(const World& world, DroneId drone);

struct OverrideOutcome {
  Action proposed;
  Action executed;
  bool overridden = false;
  std::optional<HallucinationClass> fault_class;
  std::optional<std::string> fallback_reason;
  ConstraintReport report;  // of the proposal
};

Action select_fallback(const World& world, DroneId drone, const Action& proposed,
                       const ConstraintReport& report, const FallbackSource& source,
                       const ConstraintConfig& config, std::string* reason = nullptr);

// Passes feasible proposals through untouched and replaces anything else
// (including Pass) with a feasible fallback. With `enforce` off the
// proposal is executed as-is and the report is kept for auditing; a Pass
// then executes as idle.
OverrideOutcome filter_action(const World& world, DroneId drone, const Action& proposed,
                              const FallbackSource& source, const ConstraintConfig& config,
                              bool enforce = true, bool parse_failure = false);

struct HallucinationStats {
  std::array<long, kHallucinationClassCount> counts{};

  void record(HallucinationClass c, long n = 1) { counts[static_cast<std::size_t>(c)] += n; }
  long total() const;
  // Shares over all recorded events; all zero when nothing was recorded.
  std::array<double, kHallucinationClassCount> shares() const;
  HallucinationStats& operator+=(const HallucinationStats& other);
};

HallucinationStats audit(const std::array<long, kHallucinationClassCount>& counts);

}  // namespace dronesafe
