#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dronesafe/llm_client.hpp"
#include "dronesafe/planner.hpp"
#include "dronesafe/rl.hpp"
#include "dronesafe/safety.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

enum class RunMode { kPlannerOnly, kSafeguarded };
enum class PlannerKind { kMock, kLlm };

std::string_view run_mode_name(RunMode m);
RunMode parse_run_mode(std::string_view name);

// Everything one experiment needs. The on-disk form is JSON, documented in
// docs/config.md; the current schema version is 1.
struct ExperimentConfig {
  RunMode mode = RunMode::kSafeguarded;
  PlannerKind planner = PlannerKind::kMock;
  FaultConfig faults;
  WorldConfig world = WorldConfig::desk_scale();
  ConstraintConfig constraints;
  RlConfig rl;
  EndpointConfig endpoint;
  std::optional<std::string> global_prompt_path;
  std::optional<std::string> local_prompt_path;
  // Trained parameters; when set, safeguarded runs use the critic-driven
  // fallback instead of the ladder.
  std::optional<std::string> checkpoint;
  int episodes = 1;  // per seed
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  bool write_trajectory = true;

  void validate() const;
};

inline constexpr int kConfigVersion = 1;

// Throws std::runtime_error naming the file, or the offending key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string dump_config(const ExperimentConfig& config);

}  // namespace dronesafe
