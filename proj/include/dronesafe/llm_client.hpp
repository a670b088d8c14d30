#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dronesafe/action.hpp"
#include "dronesafe/planner.hpp"
#include "dronesafe/replay.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

struct PromptTemplate {
  Tier tier = Tier::kGlobal;
  std::string text;

  // Built-in templates; identical to prompts/global.txt and prompts/local.txt.
  static PromptTemplate builtin(Tier tier);
  static PromptTemplate from_file(Tier tier, const std::string& path);
};

struct PromptTemplates {
  PromptTemplate global = PromptTemplate::builtin(Tier::kGlobal);
  PromptTemplate local = PromptTemplate::builtin(Tier::kLocal);

  const PromptTemplate& for_tier(Tier t) const { return t == Tier::kGlobal ? global : local; }
};

// Everything the prompt needs about one drone's situation.
struct StateSnapshot {
  DroneId drone = 0;
  Observation observation;
  Vec2 position;
  Vec2 warehouse;
  // Remaining stops on board: id and position.
  std::vector<Stop> customers;
  std::array<int, kSectorCount> pending{};
  std::array<int, kSectorCount> assigned_drones{};

  static StateSnapshot capture(const World& world, DroneId drone);
};

struct RenderedPrompt {
  std::string text;
  bool truncated = false;  // memory examples dropped to fit the budget
  int examples_dropped = 0;
};

// Rough token estimate (4 characters per token).
int estimate_tokens(std::string_view text);

// Throws std::invalid_argument if a placeholder is left unresolved.
RenderedPrompt render_prompt(Tier tier, const StateSnapshot& snapshot, std::span<const PlannerRecord> memory,
                             const PromptTemplates& templates = {}, int token_budget = 4096);

class ParseFailure : public std::runtime_error {
 public:
  explicit ParseFailure(std::string raw)
      : std::runtime_error("unparseable planner response: " + raw), raw_(std::move(raw)) {}
  const std::string& raw_text() const { return raw_; }

 private:
  std::string raw_;
};

// Reads the command after the last "Decision:" (global) or "Action Plan:"
// (local) marker, case-insensitively. Throws ParseFailure.
Action parse_decision(Tier tier, std::string_view response_text);

struct EndpointConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model_global = "gpt-4o";
  std::string model_local = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 20.0;
  int max_retries = 3;
  double temperature = 0.0;
  double backoff_initial_s = 0.25;
  int token_budget = 4096;

  void validate() const;
};

class EndpointUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Request body for a single-turn chat completion.
std::string build_chat_request(const std::string& model, const std::string& prompt, double temperature);
// choices[0].message.content; throws std::runtime_error on a malformed body.
std::string extract_chat_content(const std::string& body);

// Single-turn chat completion with retry and exponential backoff. Total
// wall time stays within timeout_s * (max_retries + 1).
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config);
  std::string complete(const std::string& model, const std::string& prompt) const;
  int last_attempts() const { return last_attempts_; }

 private:
  EndpointConfig config_;
  mutable int last_attempts_ = 0;
};

// Planner backed by a chat-completion endpoint. Parse failures become Pass
// with parse_failure set; an unreachable endpoint falls back to `fallback`.
class LlmPlanner : public Planner {
 public:
  using Completion = std::function<std::string(Tier, const std::string& prompt)>;

  LlmPlanner(EndpointConfig config, PromptTemplates templates, std::unique_ptr<Planner> fallback);
  // Injected transport, used by tests and offline replays.
  LlmPlanner(Completion completion, PromptTemplates templates, std::unique_ptr<Planner> fallback,
             int token_budget = 4096);

  void reset(std::uint64_t episode_seed) override;
  PlannerProposal propose(const PlannerContext& ctx) override;

 private:
  Completion completion_;
  PromptTemplates templates_;
  std::unique_ptr<Planner> fallback_;
  int token_budget_;
};

}  // namespace dronesafe
