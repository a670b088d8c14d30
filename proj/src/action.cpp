#include "dronesafe/action.hpp"

#include <fmt/format.h>

namespace dronesafe {

std::string_view tier_name(Tier tier) { return tier == Tier::kGlobal ? "global" : "local"; }

Action Action::go_to_sector(Sector s) {
  switch (s) {
    case Sector::kEast:
      return {ActionKind::kGoToSectorEast, -1};
    case Sector::kWest:
      return {ActionKind::kGoToSectorWest, -1};
    case Sector::kNorth:
      return {ActionKind::kGoToSectorNorth, -1};
    case Sector::kSouth:
      return {ActionKind::kGoToSectorSouth, -1};
  }
  return global_idle();
}

bool Action::is_global() const {
  switch (kind) {
    case ActionKind::kGoToSectorEast:
    case ActionKind::kGoToSectorWest:
    case ActionKind::kGoToSectorNorth:
    case ActionKind::kGoToSectorSouth:
    case ActionKind::kGlobalIdle:
      return true;
    default:
      return false;
  }
}

bool Action::is_local() const {
  return kind == ActionKind::kMoveToCustomer || kind == ActionKind::kReturnToBase ||
         kind == ActionKind::kLocalIdle;
}

std::optional<Sector> Action::target_sector() const {
  switch (kind) {
    case ActionKind::kGoToSectorEast:
      return Sector::kEast;
    case ActionKind::kGoToSectorWest:
      return Sector::kWest;
    case ActionKind::kGoToSectorNorth:
      return Sector::kNorth;
    case ActionKind::kGoToSectorSouth:
      return Sector::kSouth;
    default:
      return std::nullopt;
  }
}

std::string canonical_name(const Action& a) {
  switch (a.kind) {
    case ActionKind::kGoToSectorEast:
      return std::string(kGlobalCommandNames[0]);
    case ActionKind::kGoToSectorWest:
      return std::string(kGlobalCommandNames[1]);
    case ActionKind::kGoToSectorNorth:
      return std::string(kGlobalCommandNames[2]);
    case ActionKind::kGoToSectorSouth:
      return std::string(kGlobalCommandNames[3]);
    case ActionKind::kGlobalIdle:
    case ActionKind::kLocalIdle:
      return "idle";
    case ActionKind::kMoveToCustomer:
      return fmt::format("move_to_customer({})", a.customer);
    case ActionKind::kReturnToBase:
      return "return_to_base";
    case ActionKind::kPass:
      return std::string(kPassToken);
  }
  return "?";
}

std::optional<PolicySlot> slot_of(const Action& a) {
  switch (a.kind) {
    case ActionKind::kGoToSectorEast:
      return PolicySlot::kGoEast;
    case ActionKind::kGoToSectorWest:
      return PolicySlot::kGoWest;
    case ActionKind::kGoToSectorNorth:
      return PolicySlot::kGoNorth;
    case ActionKind::kGoToSectorSouth:
      return PolicySlot::kGoSouth;
    case ActionKind::kGlobalIdle:
    case ActionKind::kLocalIdle:
      return PolicySlot::kIdle;
    case ActionKind::kMoveToCustomer:
      return PolicySlot::kMoveNext;
    case ActionKind::kReturnToBase:
      return PolicySlot::kReturnToBase;
    case ActionKind::kPass:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string_view hallucination_name(HallucinationClass c) {
  switch (c) {
    case HallucinationClass::kBattery:
      return "battery";
    case HallucinationClass::kDuplicate:
      return "duplicate";
    case HallucinationClass::kRoute:
      return "route";
    case HallucinationClass::kSector:
      return "sector";
    case HallucinationClass::kPass:
      return "pass";
    case HallucinationClass::kParseFailure:
      return "parse_failure";
  }
  return "unknown";
}

std::optional<HallucinationClass> parse_hallucination(std::string_view name) {
  for (int i = 0; i < kHallucinationClassCount; ++i) {
    const auto c = static_cast<HallucinationClass>(i);
    if (hallucination_name(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace dronesafe
