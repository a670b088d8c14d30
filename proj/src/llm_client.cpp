#include "dronesafe/llm_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace dronesafe {

namespace {

constexpr std::string_view kGlobalBuiltin =
    R"(You coordinate one delivery drone in a simulated logistics network. Pick the single best high-level command for this drone given the current state.
Reply with exactly one line: the word Decision, a colon, then one command name.

Past proposals and how the safety monitor judged them:
{incontext_examples_global}

Current state: {state_info}
Allowed commands: ["go_to_sector_east", "go_to_sector_west", "go_to_sector_north", "go_to_sector_south", "idle"]
Respect battery limits and keep sectors balanced. If every command looks unsafe, answer <pass>.

Description: {input}
Decision:
)";

constexpr std::string_view kLocalBuiltin =
    R"(You fly one delivery drone along its assigned route. Produce the next command for this drone.
Reply with exactly one line: the words Action Plan, a colon, then one command. Write move_to_customer(<id>) to fly to a customer.

Past proposals and how the safety monitor judged them:
{incontext_examples_execution}

Warehouse: {warehouse_location}
Customers on board: {customers_list}
Allowed commands: ["move_to_customer", "return_to_base", "idle"]
Keep enough charge to get home. If every command looks unsafe, answer <pass>.

Description: {input}
Action Plan:
)";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

void replace_all(std::string& text, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

std::string format_point(Vec2 p) { return fmt::format("({:.1f}, {:.1f})", p.x, p.y); }

std::string state_info(const StateSnapshot& s) {
  const Observation& o = s.observation;
  std::string sector = "none";
  for (Sector sec : kAllSectors) {
    if (o.sector_assignment[static_cast<std::size_t>(index_of(sec))] > 0.5) sector = sector_name(sec);
  }
  std::string out = fmt::format("drone={} x={:.1f} y={:.1f} battery={:.3f} sector={} distance={:.3f}", s.drone,
                                s.position.x, s.position.y, o.battery, sector, o.normalized_distance);
  for (Sector sec : kAllSectors) {
    out += fmt::format(" pending_{}={}", sector_name(sec), s.pending[static_cast<std::size_t>(index_of(sec))]);
  }
  for (Sector sec : kAllSectors) {
    out += fmt::format(" drones_{}={}", sector_name(sec),
                       s.assigned_drones[static_cast<std::size_t>(index_of(sec))]);
  }
  return out;
}

std::string render_examples(std::span<const PlannerRecord> memory) {
  if (memory.empty()) return "(none yet)";
  std::string out;
  for (const PlannerRecord& r : memory) {
    if (!out.empty()) out += '\n';
    out += fmt::format("- t={} drone={} proposed={} -> ", r.t, r.drone, canonical_name(r.proposed));
    if (r.override_flag) {
      out += fmt::format("overridden ({})", r.fault_class ? hallucination_name(*r.fault_class) : "unknown");
    } else {
      out += "accepted";
    }
  }
  return out;
}

std::string customers_list(const std::vector<Stop>& stops) {
  std::string out = "[";
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("c{} at {}", stops[i].id, format_point(stops[i].position));
  }
  return out + "]";
}

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

const std::regex& placeholder_pattern() {
  static const std::regex re(R"(\{[a-z_]+\})");
  return re;
}

std::string render_once(Tier tier, const StateSnapshot& snap, std::span<const PlannerRecord> memory,
                        const PromptTemplates& templates) {
  std::string text = templates.for_tier(tier).text;
  const std::string info = state_info(snap);
  const std::string examples = render_examples(memory);
  replace_all(text, "{incontext_examples_global}", examples);
  replace_all(text, "{incontext_examples_execution}", examples);
  replace_all(text, "{warehouse_location}", format_point(snap.warehouse));
  replace_all(text, "{customers_list}", customers_list(snap.customers));
  const std::string input =
      tier == Tier::kGlobal
          ? fmt::format("drone {} is at the warehouse and needs a sector.", snap.drone)
          : fmt::format("drone {} carries {} package(s); state {}.", snap.drone, snap.customers.size(), info);
  // State last: it is generated text and must not be rescanned.
  replace_all(text, "{input}", input);
  replace_all(text, "{state_info}", info);
  return text;
}

}  // namespace

PromptTemplate PromptTemplate::builtin(Tier tier) {
  return {tier, std::string(tier == Tier::kGlobal ? kGlobalBuiltin : kLocalBuiltin)};
}

PromptTemplate PromptTemplate::from_file(Tier tier, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prompt template " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return {tier, strip_comments(buf.str())};
}

StateSnapshot StateSnapshot::capture(const World& world, DroneId drone) {
  StateSnapshot s;
  s.drone = drone;
  s.observation = world.observe(drone);
  s.position = world.drone(drone).position;
  s.warehouse = world.config().grid.warehouse;
  s.customers = world.claimed_stops(drone);
  for (Sector sec : kAllSectors) {
    const auto i = static_cast<std::size_t>(index_of(sec));
    s.pending[i] = world.pending_in(sec);
    s.assigned_drones[i] = world.drones_assigned_to(sec);
  }
  return s;
}

int estimate_tokens(std::string_view text) { return static_cast<int>((text.size() + 3) / 4); }

RenderedPrompt render_prompt(Tier tier, const StateSnapshot& snapshot, std::span<const PlannerRecord> memory,
                             const PromptTemplates& templates, int token_budget) {
  // Placeholders are checked on the template itself so generated text can
  // never trip the check.
  std::string skeleton = templates.for_tier(tier).text;
  for (std::string_view key : {"{incontext_examples_global}", "{incontext_examples_execution}",
                               "{warehouse_location}", "{customers_list}", "{input}", "{state_info}"}) {
    replace_all(skeleton, key, "");
  }
  std::smatch m;
  if (std::regex_search(skeleton, m, placeholder_pattern())) {
    throw std::invalid_argument("unresolved placeholder " + m.str() + " in prompt template");
  }

  RenderedPrompt out;
  std::span<const PlannerRecord> window = memory;
  out.text = render_once(tier, snapshot, window, templates);
  while (estimate_tokens(out.text) > token_budget && !window.empty()) {
    window = window.subspan(1);
    ++out.examples_dropped;
    out.truncated = true;
    out.text = render_once(tier, snapshot, window, templates);
  }
  return out;
}

Action parse_decision(Tier tier, std::string_view response_text) {
  std::string text(response_text);
  text.erase(std::remove(text.begin(), text.end(), '*'), text.end());
  const std::string low = lower(text);
  const std::string marker = tier == Tier::kGlobal ? "decision:" : "action plan:";
  const std::size_t pos = low.rfind(marker);
  if (pos == std::string::npos) throw ParseFailure(std::string(response_text));

  std::string rest = trim(low.substr(pos + marker.size()));
  if (const std::size_t nl = rest.find('\n'); nl != std::string::npos) rest = rest.substr(0, nl);
  std::string token = trim(rest);
  while (!token.empty() && std::string_view(".,;:!\"'`").find(token.back()) != std::string_view::npos) {
    token.pop_back();
  }
  while (!token.empty() && std::string_view("\"'`").find(token.front()) != std::string_view::npos) {
    token.erase(token.begin());
  }
  token = trim(token);

  if (token == kPassToken) return Action::pass();
  if (tier == Tier::kGlobal) {
    static constexpr std::array<Sector, 4> kOrder = {Sector::kEast, Sector::kWest, Sector::kNorth, Sector::kSouth};
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      if (token == kGlobalCommandNames[i]) return Action::go_to_sector(kOrder[i]);
    }
    if (token == "idle") return Action::global_idle();
    throw ParseFailure(std::string(response_text));
  }

  if (token == "return_to_base") return Action::return_to_base();
  if (token == "idle") return Action::local_idle();
  static const std::regex move_re(R"(^(?:move_to_customer\s*[\(\s]\s*c?(\d+)\s*\)?|c(\d+))$)");
  std::smatch m;
  if (std::regex_match(token, m, move_re)) {
    const std::string digits = m[1].matched ? m[1].str() : m[2].str();
    return Action::move_to_customer(std::stoi(digits));
  }
  throw ParseFailure(std::string(response_text));
}

void EndpointConfig::validate() const {
  if (!(timeout_s > 0.0)) throw std::invalid_argument("endpoint timeout must be positive");
  if (max_retries < 0) throw std::invalid_argument("endpoint retries must be non-negative");
  if (!(backoff_initial_s >= 0.0)) throw std::invalid_argument("backoff must be non-negative");
  if (base_url.empty()) throw std::invalid_argument("endpoint base_url is empty");
  if (token_budget <= 0) throw std::invalid_argument("token budget must be positive");
}

std::string build_chat_request(const std::string& model, const std::string& prompt, double temperature) {
  nlohmann::json body = {
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
  };
  return body.dump();
}

std::string extract_chat_content(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed chat completion response: ") + e.what());
  }
}

ChatClient::ChatClient(EndpointConfig config) : config_(std::move(config)) { config_.validate(); }

std::string ChatClient::complete(const std::string& model, const std::string& prompt) const {
  using Clock = std::chrono::steady_clock;
  last_attempts_ = 0;

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw EndpointUnavailable("environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(config_.timeout_s * (config_.max_retries + 1)));
  const std::string body = build_chat_request(model, prompt, config_.temperature);
  std::string last_error = "no attempt made";
  double backoff = config_.backoff_initial_s;

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    const double remaining = std::chrono::duration<double>(deadline - Clock::now()).count();
    if (remaining <= 0.0) break;
    const double per_try = std::min(config_.timeout_s, remaining);
    const auto usec = std::chrono::microseconds(static_cast<long long>(per_try * 1e6));

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(usec);
    client.set_read_timeout(usec);
    client.set_write_timeout(usec);
    ++last_attempts_;
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (res) {
      if (res->status == 200) {
        try {
          return extract_chat_content(res->body);
        } catch (const std::runtime_error& e) {
          last_error = e.what();
        }
      } else if (res->status == 429 || res->status >= 500) {
        last_error = fmt::format("HTTP {}", res->status);
      } else {
        throw EndpointUnavailable(fmt::format("endpoint rejected the request with HTTP {}", res->status));
      }
    } else {
      last_error = httplib::to_string(res.error());
    }

    if (attempt == config_.max_retries) break;
    const double left = std::chrono::duration<double>(deadline - Clock::now()).count();
    const double wait = std::min(backoff, std::max(0.0, left));
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    backoff *= 2.0;
  }
  throw EndpointUnavailable(fmt::format("endpoint unavailable after {} attempt(s): {}", last_attempts_, last_error));
}

LlmPlanner::LlmPlanner(EndpointConfig config, PromptTemplates templates, std::unique_ptr<Planner> fallback)
    : templates_(std::move(templates)), fallback_(std::move(fallback)), token_budget_(config.token_budget) {
  auto client = std::make_shared<ChatClient>(config);
  completion_ = [client, config](Tier tier, const std::string& prompt) {
    return client->complete(tier == Tier::kGlobal ? config.model_global : config.model_local, prompt);
  };
}

LlmPlanner::LlmPlanner(Completion completion, PromptTemplates templates, std::unique_ptr<Planner> fallback,
                       int token_budget)
    : completion_(std::move(completion)),
      templates_(std::move(templates)),
      fallback_(std::move(fallback)),
      token_budget_(token_budget) {}

void LlmPlanner::reset(std::uint64_t episode_seed) {
  if (fallback_) fallback_->reset(episode_seed);
}

PlannerProposal LlmPlanner::propose(const PlannerContext& ctx) {
  const Tier tier = ctx.world.tier_of(ctx.drone);
  const RenderedPrompt prompt =
      render_prompt(tier, StateSnapshot::capture(ctx.world, ctx.drone), ctx.memory, templates_, token_budget_);

  std::string response;
  try {
    response = completion_(tier, prompt.text);
  } catch (const EndpointUnavailable&) {
    if (!fallback_) throw;
    PlannerProposal p = fallback_->propose(ctx);
    p.endpoint_fallback = true;
    return p;
  }

  PlannerProposal p;
  p.drone = ctx.drone;
  p.tier = tier;
  p.source = ProposalSource::kLlm;
  p.raw_text = response;
  try {
    p.proposed = parse_decision(tier, response);
  } catch (const ParseFailure&) {
    p.proposed = Action::pass();
    p.parse_failure = true;
  }
  return p;
}

}  // namespace dronesafe
