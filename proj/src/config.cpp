#include "dronesafe/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dronesafe {

using nlohmann::json;

std::string_view run_mode_name(RunMode m) { return m == RunMode::kSafeguarded ? "safeguarded" : "planner_only"; }

RunMode parse_run_mode(std::string_view name) {
  if (name == "safeguarded") return RunMode::kSafeguarded;
  if (name == "planner_only") return RunMode::kPlannerOnly;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected planner_only or safeguarded)");
}

void ExperimentConfig::validate() const {
  faults.validate();
  world.validate();
  constraints.validate();
  rl.validate();
  if (planner == PlannerKind::kLlm) endpoint.validate();
  if (episodes < 0) throw std::invalid_argument("episodes must be non-negative");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (output_dir.empty()) throw std::invalid_argument("output_dir is empty");
}

namespace {

// Reads keys from one JSON object and rejects anything it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::runtime_error(path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::runtime_error("config key " + path_ + "." + key + " has the wrong type");
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Section(j_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw std::runtime_error("unknown config key " + path_ + "." + key);
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_world(Section& s, WorldConfig& w) {
  s.get("half_extent", w.grid.half_extent);
  s.get("time_step", w.grid.time_step);
  s.get("max_steps", w.grid.max_steps);
  s.get("drone_count", w.grid.drone_count);
  s.get("min_customers_per_sector", w.spawn.min_per_sector);
  s.get("max_customers_per_sector", w.spawn.max_per_sector);
  if (auto r = s.child("reward")) {
    r->get("delivery", w.reward.delivery);
    r->get("distance", w.reward.distance);
    r->get("battery", w.reward.battery);
    r->finish();
  }
  s.finish();
}

void read_aircraft(Section& s, AircraftParams& a) {
  s.get("max_packages", a.max_packages);
  s.get("cruise_speed", a.cruise_speed);
  s.get("mass", a.mass);
  s.get("weight", a.weight);
  s.get("rotor_radius", a.rotor_radius);
  s.get("disc_area", a.disc_area);
  s.get("blade_count", a.blade_count);
  s.get("solidity", a.solidity);
  s.get("blade_angular_velocity", a.blade_angular_velocity);
  s.get("tip_speed", a.tip_speed);
  s.get("air_density", a.air_density);
  s.get("fuselage_drag_ratio", a.fuselage_drag_ratio);
  s.get("hover_induced_velocity", a.hover_induced_velocity);
  s.get("profile_drag_coeff", a.profile_drag_coeff);
  s.get("induced_power_factor", a.induced_power_factor);
  s.finish();
}

void read_battery(Section& s, BatteryModel& b) {
  s.get("capacity_kwh", b.capacity_kwh);
  s.get("max_charge_per_journey_kwh", b.max_charge_per_journey_kwh);
  s.get("charger_power_kw", b.charger_power_kw);
  s.get("reserve_fraction", b.reserve_fraction);
  s.finish();
}

void read_constraints(Section& s, ConstraintConfig& c) {
  s.get("battery_reserve", c.battery_reserve);
  s.get("route_slack", c.route_slack);
  s.get("sector_tolerance", c.sector_tolerance);
  if (auto e = s.child("enabled")) {
    e->get("battery", c.enabled[0]);
    e->get("duplicate", c.enabled[1]);
    e->get("route", c.enabled[2]);
    e->get("sector", c.enabled[3]);
    e->finish();
  }
  s.finish();
}

void read_faults(Section& s, FaultConfig& f) {
  s.get("duplicate_visit", f.duplicate_visit);
  s.get("battery_ignore", f.battery_ignore);
  s.get("inefficient_route", f.inefficient_route);
  s.get("sector_imbalance", f.sector_imbalance);
  s.finish();
}

void read_rl(Section& s, RlConfig& r) {
  s.get("gamma", r.gamma);
  s.get("eta", r.eta);
  s.get("entropy_bonus", r.entropy_bonus);
  s.get("policy_lr", r.policy_lr);
  s.get("critic_lr", r.critic_lr);
  s.get("lambda_lr", r.lambda_lr);
  s.get("batch_size", r.batch_size);
  s.get("update_period", r.update_period);
  s.get("replay_capacity", r.replay_capacity);
  s.get("memory_capacity", r.memory_capacity);
  s.get("memory_window", r.memory_window);
  s.get("hidden", r.hidden);
  s.get("target_sync", r.target_sync);
  s.get("warmup_episodes", r.warmup_episodes);
  s.get("cost_budget", r.cost_budget);
  s.get("max_rejections", r.max_rejections);
  s.finish();
}

void read_endpoint(Section& s, EndpointConfig& e) {
  s.get("base_url", e.base_url);
  s.get("path", e.path);
  s.get("model_global", e.model_global);
  s.get("model_local", e.model_local);
  s.get("api_key_env", e.api_key_env);
  s.get("timeout_s", e.timeout_s);
  s.get("max_retries", e.max_retries);
  s.get("temperature", e.temperature);
  s.get("backoff_initial_s", e.backoff_initial_s);
  s.get("token_budget", e.token_budget);
  s.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  Section root(j, "config");
  int version = 0;
  root.get("version", version);
  if (version != kConfigVersion) {
    throw std::runtime_error("config version must be " + std::to_string(kConfigVersion));
  }

  ExperimentConfig c;
  std::string preset = "desk";
  root.get("preset", preset);
  if (preset == "reference") {
    c.world = WorldConfig{};
  } else if (preset != "desk") {
    throw std::runtime_error("unknown preset '" + preset + "' (expected desk or reference)");
  }

  std::string mode(run_mode_name(c.mode));
  root.get("mode", mode);
  try {
    c.mode = parse_run_mode(mode);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(e.what());
  }
  std::string planner = "mock";
  root.get("planner", planner);
  if (planner == "mock") {
    c.planner = PlannerKind::kMock;
  } else if (planner == "llm") {
    c.planner = PlannerKind::kLlm;
  } else {
    throw std::runtime_error("unknown planner '" + planner + "' (expected mock or llm)");
  }
  root.get("episodes", c.episodes);
  root.get("seeds", c.seeds);
  root.get("output_dir", c.output_dir);
  root.get("write_trajectory", c.write_trajectory);
  std::string checkpoint;
  root.get("checkpoint", checkpoint);
  if (!checkpoint.empty()) c.checkpoint = checkpoint;

  if (auto s = root.child("world")) read_world(*s, c.world);
  if (auto s = root.child("aircraft")) read_aircraft(*s, c.world.aircraft);
  if (auto s = root.child("battery")) read_battery(*s, c.world.battery);
  if (auto s = root.child("constraints")) read_constraints(*s, c.constraints);
  if (auto s = root.child("faults")) read_faults(*s, c.faults);
  if (auto s = root.child("rl")) read_rl(*s, c.rl);
  if (auto s = root.child("endpoint")) read_endpoint(*s, c.endpoint);
  if (auto s = root.child("prompts")) {
    std::string g;
    std::string l;
    s->get("global", g);
    s->get("local", l);
    s->finish();
    if (!g.empty()) c.global_prompt_path = g;
    if (!l.empty()) c.local_prompt_path = l;
  }
  root.finish();

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& c) {
  const WorldConfig& w = c.world;
  const AircraftParams& a = w.aircraft;
  json j = {
      {"version", kConfigVersion},
      {"mode", std::string(run_mode_name(c.mode))},
      {"planner", c.planner == PlannerKind::kMock ? "mock" : "llm"},
      {"episodes", c.episodes},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
      {"write_trajectory", c.write_trajectory},
      {"world",
       {{"half_extent", w.grid.half_extent},
        {"time_step", w.grid.time_step},
        {"max_steps", w.grid.max_steps},
        {"drone_count", w.grid.drone_count},
        {"min_customers_per_sector", w.spawn.min_per_sector},
        {"max_customers_per_sector", w.spawn.max_per_sector},
        {"reward", {{"delivery", w.reward.delivery}, {"distance", w.reward.distance}, {"battery", w.reward.battery}}}}},
      {"aircraft",
       {{"max_packages", a.max_packages},
        {"cruise_speed", a.cruise_speed},
        {"mass", a.mass},
        {"weight", a.weight},
        {"rotor_radius", a.rotor_radius},
        {"disc_area", a.disc_area},
        {"blade_count", a.blade_count},
        {"solidity", a.solidity},
        {"blade_angular_velocity", a.blade_angular_velocity},
        {"tip_speed", a.tip_speed},
        {"air_density", a.air_density},
        {"fuselage_drag_ratio", a.fuselage_drag_ratio},
        {"hover_induced_velocity", a.hover_induced_velocity},
        {"profile_drag_coeff", a.profile_drag_coeff},
        {"induced_power_factor", a.induced_power_factor}}},
      {"battery",
       {{"capacity_kwh", w.battery.capacity_kwh},
        {"max_charge_per_journey_kwh", w.battery.max_charge_per_journey_kwh},
        {"charger_power_kw", w.battery.charger_power_kw},
        {"reserve_fraction", w.battery.reserve_fraction}}},
      {"constraints",
       {{"battery_reserve", c.constraints.battery_reserve},
        {"route_slack", c.constraints.route_slack},
        {"sector_tolerance", c.constraints.sector_tolerance},
        {"enabled",
         {{"battery", c.constraints.enabled[0]},
          {"duplicate", c.constraints.enabled[1]},
          {"route", c.constraints.enabled[2]},
          {"sector", c.constraints.enabled[3]}}}}},
      {"faults",
       {{"duplicate_visit", c.faults.duplicate_visit},
        {"battery_ignore", c.faults.battery_ignore},
        {"inefficient_route", c.faults.inefficient_route},
        {"sector_imbalance", c.faults.sector_imbalance}}},
      {"rl",
       {{"gamma", c.rl.gamma},
        {"eta", c.rl.eta},
        {"entropy_bonus", c.rl.entropy_bonus},
        {"policy_lr", c.rl.policy_lr},
        {"critic_lr", c.rl.critic_lr},
        {"lambda_lr", c.rl.lambda_lr},
        {"batch_size", c.rl.batch_size},
        {"update_period", c.rl.update_period},
        {"replay_capacity", c.rl.replay_capacity},
        {"memory_capacity", c.rl.memory_capacity},
        {"memory_window", c.rl.memory_window},
        {"hidden", c.rl.hidden},
        {"target_sync", c.rl.target_sync},
        {"warmup_episodes", c.rl.warmup_episodes},
        {"cost_budget", c.rl.cost_budget},
        {"max_rejections", c.rl.max_rejections}}},
      {"endpoint",
       {{"base_url", c.endpoint.base_url},
        {"path", c.endpoint.path},
        {"model_global", c.endpoint.model_global},
        {"model_local", c.endpoint.model_local},
        {"api_key_env", c.endpoint.api_key_env},
        {"timeout_s", c.endpoint.timeout_s},
        {"max_retries", c.endpoint.max_retries},
        {"temperature", c.endpoint.temperature},
        {"backoff_initial_s", c.endpoint.backoff_initial_s},
        {"token_budget", c.endpoint.token_budget}}},
  };
  if (c.checkpoint) j["checkpoint"] = *c.checkpoint;
  if (c.global_prompt_path || c.local_prompt_path) {
    j["prompts"] = {{"global", c.global_prompt_path.value_or("")}, {"local", c.local_prompt_path.value_or("")}};
  }
  return j.dump(2);
}

}  // namespace dronesafe
