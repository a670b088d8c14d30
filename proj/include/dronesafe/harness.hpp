#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dronesafe/config.hpp"
#include "dronesafe/planner.hpp"
#include "dronesafe/safety.hpp"

namespace dronesafe {

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population
};

// Throws std::invalid_argument on an empty list.
Summary summarize(std::span<const double> values);

struct EpisodeMetrics {
  RunMode mode = RunMode::kSafeguarded;
  std::uint64_t seed = 0;
  int episode = 0;
  std::uint64_t layout_hash = 0;
  int customers = 0;
  int served = 0;
  double success_rate = 0.0;
  std::vector<double> battery_consumption;  // per drone, consumed / (capacity + charged)
  double battery_mean = 0.0;
  double distance_total = 0.0;  // m, whole fleet
  int steps = 0;
  int decisions = 0;
  int overrides = 0;
  // Proposals the constraints flag, overridden or not.
  HallucinationStats hallucinations;
  std::array<int, kFaultClassCount> injected{};
  std::array<int, kFaultClassCount> injected_detected{};
  // Executed actions with some g_k > 0.
  int executed_violations = 0;
  int depleted_drones = 0;
  int endpoint_fallbacks = 0;
};

struct MetricsBundle {
  RunMode mode = RunMode::kSafeguarded;
  std::vector<EpisodeMetrics> episodes;
  Summary success_rate;
  Summary battery;  // over episodes of the fleet mean
  Summary distance;
  // Per-drone consumption averaged over episodes, then summarized over drones.
  std::vector<double> per_drone_battery;
  Summary per_drone_summary;
  HallucinationStats hallucinations;
  long overrides = 0;
  long executed_violations = 0;
  std::array<long, kFaultClassCount> injected{};
  std::array<long, kFaultClassCount> injected_detected{};
};

MetricsBundle aggregate(RunMode mode, std::vector<EpisodeMetrics> episodes);

// World seed of one (seed, episode) pair; both modes of a comparison use it.
std::uint64_t episode_seed(std::uint64_t seed, int episode);

// Mock (or llm) planner wrapped in the configured fault injection.
std::unique_ptr<Planner> make_planner(const ExperimentConfig& config);

// Runs one episode. Appends one JSON line per (step, drone) to `trajectory`
// when it is non-null.
EpisodeMetrics run_episode(const ExperimentConfig& config, Planner& planner, std::uint64_t seed, int episode,
                           std::vector<std::string>* trajectory = nullptr, const ActionScorer* scorer = nullptr);

// All (seed, episode) pairs in order. With write_outputs, writes
// episodes.csv, drones.csv, summary.json and trajectory.jsonl under
// config.output_dir.
MetricsBundle run_experiment(const ExperimentConfig& config, bool write_outputs = true);

struct Comparison {
  MetricsBundle planner_only;
  MetricsBundle safeguarded;
  bool layouts_match = false;
};

// Both modes on identical seeds; outputs go to <out>/planner_only,
// <out>/safeguarded and <out>/compare.json.
Comparison compare(const ExperimentConfig& config, bool write_outputs = true);

std::string summary_json(const MetricsBundle& bundle);
std::string compare_json(const Comparison& c);
// Plain-text hallucination table (counts and shares).
std::string audit_table(const HallucinationStats& stats);

// success_rate per episode rebuilt from trajectory lines plus the customer
// counts in the episode CSV; keyed in (seed, episode) order.
std::vector<double> success_from_trajectory(std::span<const std::string> trajectory_lines,
                                            std::span<const EpisodeMetrics> episodes);

}  // namespace dronesafe
