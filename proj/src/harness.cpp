#include "dronesafe/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "dronesafe/llm_client.hpp"
#include "dronesafe/rl.hpp"

namespace dronesafe {

using nlohmann::json;

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize needs at least one value");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), 0xe915U};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::unique_ptr<Planner> make_planner(const ExperimentConfig& config) {
  std::unique_ptr<Planner> inner;
  MockPlanner::Options opts;
  opts.sector_tolerance = config.constraints.sector_tolerance;
  if (config.planner == PlannerKind::kLlm) {
    PromptTemplates templates;
    if (config.global_prompt_path) templates.global = PromptTemplate::from_file(Tier::kGlobal, *config.global_prompt_path);
    if (config.local_prompt_path) templates.local = PromptTemplate::from_file(Tier::kLocal, *config.local_prompt_path);
    inner = std::make_unique<LlmPlanner>(config.endpoint, std::move(templates), std::make_unique<MockPlanner>(opts));
  } else {
    inner = std::make_unique<MockPlanner>(opts);
  }
  return std::make_unique<FaultInjectingPlanner>(std::move(inner), config.faults, config.world.grid.drone_count);
}

namespace {

std::optional<HallucinationClass> classify(const PlannerProposal& p, const ConstraintReport& report) {
  if (p.proposed.is_pass()) return p.parse_failure ? HallucinationClass::kParseFailure : HallucinationClass::kPass;
  if (const auto worst = report.worst()) return to_hallucination(*worst);
  return std::nullopt;
}

bool detects(FaultClass fault, const ConstraintReport& report) {
  const Constraint c = fault == FaultClass::kDuplicateVisit      ? Constraint::kDuplicate
                       : fault == FaultClass::kBatteryIgnore     ? Constraint::kBattery
                       : fault == FaultClass::kInefficientRoute  ? Constraint::kRoute
                                                                 : Constraint::kSector;
  return report.hinge(c) > 0.0;
}

std::string trajectory_line(const EpisodeMetrics& m, const World& world, DroneId id, const Action& proposed,
                            const Action& executed, bool overridden, std::optional<HallucinationClass> cls,
                            const DroneOutcome& outcome) {
  const DroneState& d = world.drone(id);
  return fmt::format(
      R"({{"seed":{},"episode":{},"t":{},"drone_id":{},"x":{},"y":{},"soc":{},"mode":"{}","proposed":"{}",)"
      R"("action":"{}","overridden":{},"hallucination":"{}","reward":{},"delivered":{}}})",
      m.seed, m.episode, world.state().t, id, d.position.x, d.position.y, d.soc.fraction(), mode_name(d.mode),
      canonical_name(proposed), canonical_name(executed), overridden ? "true" : "false",
      cls ? hallucination_name(*cls) : "", outcome.reward, outcome.deliveries);
}

}  // namespace

EpisodeMetrics run_episode(const ExperimentConfig& config, Planner& planner, std::uint64_t seed, int episode,
                           std::vector<std::string>* trajectory, const ActionScorer* scorer) {
  const std::uint64_t ws = episode_seed(seed, episode);
  World world(config.world, ws);
  planner.reset(ws);
  PlannerMemory memory(static_cast<std::size_t>(config.rl.memory_capacity));
  const bool enforce = config.mode == RunMode::kSafeguarded;
  const FallbackSource source = scorer ? FallbackSource::policy(*scorer) : FallbackSource::ladder();

  EpisodeMetrics m;
  m.mode = config.mode;
  m.seed = seed;
  m.episode = episode;
  m.layout_hash = layout_hash(world.state());
  m.customers = static_cast<int>(world.state().customers.size());

  const int drones = config.world.grid.drone_count;
  while (!world.is_terminal()) {
    for (DroneId id = 0; id < drones; ++id) {
      if (!world.needs_decision(id)) {
        const DroneOutcome o = world.apply(id, Action::local_idle());
        if (trajectory) {
          trajectory->push_back(trajectory_line(m, world, id, Action::local_idle(), Action::local_idle(), false,
                                                std::nullopt, o));
        }
        continue;
      }
      const Observation obs = world.observe(id);
      const auto recent = memory.recent_window(static_cast<std::size_t>(config.rl.memory_window));
      const PlannerProposal p = planner.propose(PlannerContext{world, id, recent});
      if (p.endpoint_fallback) ++m.endpoint_fallbacks;
      const OverrideOutcome f =
          filter_action(world, id, p.proposed, source, config.constraints, enforce, p.parse_failure);
      const std::optional<HallucinationClass> cls = classify(p, f.report);
      if (cls) m.hallucinations.record(*cls);
      if (p.injected_fault) {
        const auto k = static_cast<std::size_t>(*p.injected_fault);
        ++m.injected[k];
        if (detects(*p.injected_fault, f.report)) ++m.injected_detected[k];
      }
      if (f.overridden) ++m.overrides;
      if (!evaluate_constraints(world, id, f.executed, config.constraints).feasible()) ++m.executed_violations;
      ++m.decisions;

      PlannerRecord rec;
      rec.drone = id;
      rec.t = world.state().t;
      rec.s = obs;
      rec.proposed = p.proposed;
      rec.override_flag = f.overridden;
      rec.fault_class = f.overridden ? f.fault_class : std::nullopt;
      memory.push(rec);

      const DroneOutcome o = world.apply(id, f.executed);
      if (trajectory) trajectory->push_back(trajectory_line(m, world, id, p.proposed, f.executed, f.overridden, cls, o));
    }
    world.end_step();
    ++m.steps;
  }

  m.served = world.served_count();
  m.success_rate = m.customers > 0 ? static_cast<double>(m.served) / static_cast<double>(m.customers) : 1.0;
  double sum = 0.0;
  for (const DroneState& d : world.state().drones) {
    const double share = d.energy_consumed_kwh / (config.world.battery.capacity_kwh + d.energy_charged_kwh);
    m.battery_consumption.push_back(share);
    sum += share;
    m.distance_total += d.cumulative_distance;
    if (d.mode == DroneMode::kDepleted) ++m.depleted_drones;
  }
  m.battery_mean = sum / static_cast<double>(drones);
  return m;
}

MetricsBundle aggregate(RunMode mode, std::vector<EpisodeMetrics> episodes) {
  MetricsBundle b;
  b.mode = mode;
  b.episodes = std::move(episodes);
  if (b.episodes.empty()) return b;
  std::vector<double> success;
  std::vector<double> battery;
  std::vector<double> distance;
  const std::size_t drones = b.episodes.front().battery_consumption.size();
  b.per_drone_battery.assign(drones, 0.0);
  for (const EpisodeMetrics& e : b.episodes) {
    success.push_back(e.success_rate);
    battery.push_back(e.battery_mean);
    distance.push_back(e.distance_total);
    for (std::size_t i = 0; i < drones && i < e.battery_consumption.size(); ++i) {
      b.per_drone_battery[i] += e.battery_consumption[i];
    }
    b.hallucinations += e.hallucinations;
    b.overrides += e.overrides;
    b.executed_violations += e.executed_violations;
    for (std::size_t k = 0; k < kFaultClassCount; ++k) {
      b.injected[k] += e.injected[k];
      b.injected_detected[k] += e.injected_detected[k];
    }
  }
  for (double& v : b.per_drone_battery) v /= static_cast<double>(b.episodes.size());
  b.success_rate = summarize(success);
  b.battery = summarize(battery);
  b.distance = summarize(distance);
  if (drones > 0) b.per_drone_summary = summarize(b.per_drone_battery);
  return b;
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing " + path);
}

std::string episodes_csv(const MetricsBundle& b) {
  std::string out =
      "mode,seed,episode,layout_hash,customers,served,success_rate,battery_mean,distance_total,steps,decisions,"
      "overrides,h_battery,h_duplicate,h_route,h_sector,h_pass,h_parse_failure,injected,injected_detected,"
      "executed_violations,depleted_drones,endpoint_fallbacks\n";
  for (const EpisodeMetrics& e : b.episodes) {
    const int injected = std::accumulate(e.injected.begin(), e.injected.end(), 0);
    const int detected = std::accumulate(e.injected_detected.begin(), e.injected_detected.end(), 0);
    const auto& h = e.hallucinations.counts;
    out += fmt::format("{},{},{},{:016x},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       run_mode_name(e.mode), e.seed, e.episode, e.layout_hash, e.customers, e.served,
                       e.success_rate, e.battery_mean, e.distance_total, e.steps, e.decisions, e.overrides, h[0],
                       h[1], h[2], h[3], h[4], h[5], injected, detected, e.executed_violations, e.depleted_drones,
                       e.endpoint_fallbacks);
  }
  return out;
}

std::string drones_csv(const MetricsBundle& b) {
  std::string out = "mode,seed,episode,drone,battery_consumption\n";
  for (const EpisodeMetrics& e : b.episodes) {
    for (std::size_t i = 0; i < e.battery_consumption.size(); ++i) {
      out += fmt::format("{},{},{},{},{}\n", run_mode_name(e.mode), e.seed, e.episode, i, e.battery_consumption[i]);
    }
  }
  return out;
}

// Doubles go through fmt's shortest round-trip form so reruns are
// byte-identical.
json number(double v) { return json::parse(fmt::format("{}", v)); }

json summary_object(const MetricsBundle& b) {
  json h = json::object();
  const auto shares = b.hallucinations.shares();
  for (int i = 0; i < kHallucinationClassCount; ++i) {
    const auto name = std::string(hallucination_name(static_cast<HallucinationClass>(i)));
    h[name] = {{"count", b.hallucinations.counts[static_cast<std::size_t>(i)]},
               {"share", number(shares[static_cast<std::size_t>(i)])}};
  }
  json faults = json::object();
  for (int k = 0; k < kFaultClassCount; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    faults[std::string(fault_name(static_cast<FaultClass>(k)))] = {{"injected", b.injected[idx]},
                                                                   {"detected", b.injected_detected[idx]}};
  }
  json per_drone = json::array();
  for (double v : b.per_drone_battery) per_drone.push_back(number(v));
  return {
      {"mode", std::string(run_mode_name(b.mode))},
      {"episodes", b.episodes.size()},
      {"success_rate", {{"mean", number(b.success_rate.mean)}, {"std", number(b.success_rate.std)}}},
      {"battery_consumption", {{"mean", number(b.battery.mean)}, {"std", number(b.battery.std)}}},
      {"travel_distance_m", {{"mean", number(b.distance.mean)}, {"std", number(b.distance.std)}}},
      {"per_drone_battery",
       {{"values", per_drone}, {"mean", number(b.per_drone_summary.mean)}, {"std", number(b.per_drone_summary.std)}}},
      {"overrides", b.overrides},
      {"executed_violations", b.executed_violations},
      {"hallucinations", h},
      {"injected_faults", faults},
  };
}

}  // namespace

std::string summary_json(const MetricsBundle& bundle) { return summary_object(bundle).dump(2) + "\n"; }

MetricsBundle run_experiment(const ExperimentConfig& config, bool write_outputs) {
  config.validate();
  std::unique_ptr<Planner> planner = make_planner(config);

  std::optional<Checkpoint> checkpoint;
  std::unique_ptr<CriticScorer> scorer;
  if (config.checkpoint) {
    checkpoint = load_checkpoint(*config.checkpoint);
    scorer = std::make_unique<CriticScorer>(checkpoint->critics, checkpoint->lagrange);
  }

  std::vector<std::string> trajectory;
  std::vector<std::string>* traj = write_outputs && config.write_trajectory ? &trajectory : nullptr;
  std::vector<EpisodeMetrics> episodes;
  for (std::uint64_t seed : config.seeds) {
    for (int ep = 0; ep < config.episodes; ++ep) {
      episodes.push_back(run_episode(config, *planner, seed, ep, traj, scorer.get()));
    }
  }
  MetricsBundle bundle = aggregate(config.mode, std::move(episodes));

  if (write_outputs) {
    const std::string& dir = config.output_dir;
    ensure_dir(dir);
    write_file(dir + "/episodes.csv", episodes_csv(bundle));
    write_file(dir + "/drones.csv", drones_csv(bundle));
    write_file(dir + "/summary.json", summary_json(bundle));
    if (traj) {
      std::string text;
      for (const std::string& line : trajectory) {
        text += line;
        text += '\n';
      }
      write_file(dir + "/trajectory.jsonl", text);
    }
  }
  return bundle;
}

std::string compare_json(const Comparison& c) {
  json seeds = json::array();
  for (std::size_t i = 0; i < c.planner_only.episodes.size() && i < c.safeguarded.episodes.size(); ++i) {
    const EpisodeMetrics& a = c.planner_only.episodes[i];
    const EpisodeMetrics& b = c.safeguarded.episodes[i];
    seeds.push_back({
        {"seed", a.seed},
        {"episode", a.episode},
        {"layout_hash_planner_only", fmt::format("{:016x}", a.layout_hash)},
        {"layout_hash_safeguarded", fmt::format("{:016x}", b.layout_hash)},
        {"success_rate", {{"planner_only", number(a.success_rate)}, {"safeguarded", number(b.success_rate)}}},
        {"battery_mean", {{"planner_only", number(a.battery_mean)}, {"safeguarded", number(b.battery_mean)}}},
        {"distance_total", {{"planner_only", number(a.distance_total)}, {"safeguarded", number(b.distance_total)}}},
    });
  }
  const json out = {
      {"layouts_match", c.layouts_match},
      {"planner_only", summary_object(c.planner_only)},
      {"safeguarded", summary_object(c.safeguarded)},
      {"paired", seeds},
  };
  return out.dump(2) + "\n";
}

Comparison compare(const ExperimentConfig& config, bool write_outputs) {
  Comparison c;
  ExperimentConfig po = config;
  po.mode = RunMode::kPlannerOnly;
  po.output_dir = config.output_dir + "/planner_only";
  ExperimentConfig sg = config;
  sg.mode = RunMode::kSafeguarded;
  sg.output_dir = config.output_dir + "/safeguarded";
  c.planner_only = run_experiment(po, write_outputs);
  c.safeguarded = run_experiment(sg, write_outputs);
  c.layouts_match = c.planner_only.episodes.size() == c.safeguarded.episodes.size();
  for (std::size_t i = 0; c.layouts_match && i < c.planner_only.episodes.size(); ++i) {
    c.layouts_match = c.planner_only.episodes[i].layout_hash == c.safeguarded.episodes[i].layout_hash;
  }
  if (write_outputs) {
    ensure_dir(config.output_dir);
    write_file(config.output_dir + "/compare.json", compare_json(c));
  }
  return c;
}

std::string audit_table(const HallucinationStats& stats) {
  std::string out = fmt::format("{:<16} {:>8} {:>8}\n", "class", "count", "share");
  const auto shares = stats.shares();
  for (int i = 0; i < kHallucinationClassCount; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out += fmt::format("{:<16} {:>8} {:>8.3f}\n", hallucination_name(static_cast<HallucinationClass>(i)),
                       stats.counts[idx], shares[idx]);
  }
  out += fmt::format("{:<16} {:>8} {:>8.3f}\n", "total", stats.total(), stats.total() > 0 ? 1.0 : 0.0);
  return out;
}

std::vector<double> success_from_trajectory(std::span<const std::string> trajectory_lines,
                                            std::span<const EpisodeMetrics> episodes) {
  std::map<std::pair<std::uint64_t, int>, int> delivered;
  for (const std::string& line : trajectory_lines) {
    const json j = json::parse(line);
    delivered[{j.at("seed").get<std::uint64_t>(), j.at("episode").get<int>()}] += j.at("delivered").get<int>();
  }
  std::vector<double> out;
  for (const EpisodeMetrics& e : episodes) {
    const int d = delivered[{e.seed, e.episode}];
    out.push_back(e.customers > 0 ? static_cast<double>(d) / static_cast<double>(e.customers) : 1.0);
  }
  return out;
}

}  // namespace dronesafe
