#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "dronesafe/geometry.hpp"

namespace dronesafe {

using DroneId = int;
using CustomerId = int;

enum class Tier { kGlobal, kLocal };

std::string_view tier_name(Tier tier);

enum class ActionKind {
  kGoToSectorEast,
  kGoToSectorWest,
  kGoToSectorNorth,
  kGoToSectorSouth,
  kGlobalIdle,
  kMoveToCustomer,
  kReturnToBase,
  kLocalIdle,
  kPass,
};

// One command from the two-level vocabulary. `customer` is meaningful only
// for kMoveToCustomer.
struct Action {
  ActionKind kind = ActionKind::kPass;
  CustomerId customer = -1;

  static Action go_to_sector(Sector s);
  static Action global_idle() { return {ActionKind::kGlobalIdle, -1}; }
  static Action move_to_customer(CustomerId id) { return {ActionKind::kMoveToCustomer, id}; }
  static Action return_to_base() { return {ActionKind::kReturnToBase, -1}; }
  static Action local_idle() { return {ActionKind::kLocalIdle, -1}; }
  static Action pass() { return {ActionKind::kPass, -1}; }

  bool is_global() const;
  bool is_local() const;
  bool is_pass() const { return kind == ActionKind::kPass; }
  bool is_idle() const { return kind == ActionKind::kGlobalIdle || kind == ActionKind::kLocalIdle; }
  std::optional<Sector> target_sector() const;

  friend bool operator==(const Action&, const Action&) = default;
};

// "go_to_sector_east", "move_to_customer(3)", "<pass>", ...
std::string canonical_name(const Action& a);

// Command names exactly as listed to the planners, in prompt order.
inline constexpr std::array<std::string_view, 5> kGlobalCommandNames = {
    "go_to_sector_east", "go_to_sector_west", "go_to_sector_north", "go_to_sector_south", "idle"};
inline constexpr std::array<std::string_view, 3> kLocalCommandNames = {"move_to_customer",
                                                                      "return_to_base", "idle"};
inline constexpr std::string_view kPassToken = "<pass>";

// Categorical slots used by the learned policy and critics. Move resolves to
// the next stop of the drone's optimal route; Idle resolves to the idle
// command of the drone's current tier.
enum class PolicySlot : int {
  kGoEast = 0,
  kGoWest = 1,
  kGoNorth = 2,
  kGoSouth = 3,
  kIdle = 4,
  kMoveNext = 5,
  kReturnToBase = 6,
};
inline constexpr int kPolicySlotCount = 7;

// Slot a concrete action falls into; nullopt for Pass.
std::optional<PolicySlot> slot_of(const Action& a);

// Labels for everything the safety layer can flag or override.
enum class HallucinationClass {
  kBattery = 0,
  kDuplicate = 1,
  kRoute = 2,
  kSector = 3,
  kPass = 4,
  kParseFailure = 5,
};
inline constexpr int kHallucinationClassCount = 6;

std::string_view hallucination_name(HallucinationClass c);
std::optional<HallucinationClass> parse_hallucination(std::string_view name);

}  // namespace dronesafe
