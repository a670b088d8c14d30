#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dronesafe/config.hpp"
#include "dronesafe/harness.hpp"

using namespace dronesafe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dronesafe_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

struct CliResult {
  int status = 0;
  std::string output;
};

CliResult run_cli(const std::string& args, const std::string& tag) {
  const fs::path log = scratch("cli_" + tag + ".txt");
  const std::string cmd = std::string(DRONESAFE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
}

ExperimentConfig small_config(RunMode mode, const fs::path& out) {
  ExperimentConfig c;
  c.mode = mode;
  c.seeds = {1, 2, 3};
  c.episodes = 2;
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST(Summarize, PublishedRows) {
  const std::vector<double> planner_only = {90, 85, 88, 80, 79, 70, 72, 75, 65, 60};
  const std::vector<double> shielded = {72, 68, 70, 64, 63, 56, 58, 60, 52, 48};
  const Summary a = summarize(planner_only);
  const Summary b = summarize(shielded);
  EXPECT_NEAR(a.mean, 76.4, 0.05);
  EXPECT_NEAR(a.std, 9.4, 0.05);
  EXPECT_NEAR(b.mean, 61.1, 0.05);
  // sqrt(548.9 / 10), about 7.409.
  EXPECT_NEAR(b.std, std::sqrt(54.89), 1e-12);
}

TEST(Summarize, ConstantAndEmpty) {
  const std::vector<double> c = {0.3, 0.3, 0.3};
  EXPECT_DOUBLE_EQ(summarize(c).mean, 0.3);
  EXPECT_EQ(summarize(c).std, 0.0);
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Config, VersionAndUnknownKeys) {
  EXPECT_NO_THROW(parse_config(R"({"version": 1})"));
  EXPECT_THROW(parse_config(R"({"version": 2})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({"version": 1, "episods": 3})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({"version": 1, "world": {"drones": 3}})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({"version": 1, "mode": "reckless"})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({"version": 1, "episodes": -1})"), std::runtime_error);
  EXPECT_THROW(parse_config(R"({"version": 1, "seeds": []})"), std::runtime_error);
  EXPECT_THROW(parse_config("{not json"), std::runtime_error);
}

TEST(Config, RoundTrip) {
  const ExperimentConfig c = parse_config(R"({
    "version": 1, "mode": "planner_only", "episodes": 4, "seeds": [3, 9],
    "world": {"drone_count": 6, "max_steps": 300},
    "faults": {"duplicate_visit": 0.2},
    "rl": {"eta": 0.7},
    "constraints": {"enabled": {"sector": false}}
  })");
  EXPECT_EQ(c.mode, RunMode::kPlannerOnly);
  EXPECT_EQ(c.episodes, 4);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 9}));
  EXPECT_EQ(c.world.grid.drone_count, 6);
  EXPECT_EQ(c.faults.duplicate_visit, 0.2);
  EXPECT_EQ(c.rl.eta, 0.7);
  EXPECT_FALSE(c.constraints.enabled[3]);
  const std::string dumped = dump_config(c);
  EXPECT_EQ(dump_config(parse_config(dumped)), dumped);
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config("/nonexistent/dir/missing_config.json");
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("missing_config.json"), std::string::npos);
  }
}

TEST(Harness, EpisodeSeedIsStable) {
  EXPECT_EQ(episode_seed(7, 3), episode_seed(7, 3));
  EXPECT_NE(episode_seed(7, 3), episode_seed(7, 4));
  EXPECT_NE(episode_seed(7, 3), episode_seed(8, 3));
}

TEST(Harness, SafeguardedWithoutFaultsNeedsNoOverrides) {
  ExperimentConfig c;
  c.mode = RunMode::kSafeguarded;
  c.faults = FaultConfig::none();
  c.seeds = {1, 2};
  c.episodes = 5;
  const MetricsBundle b = run_experiment(c, false);
  ASSERT_EQ(b.episodes.size(), 10u);
  EXPECT_EQ(b.success_rate.mean, 1.0);
  EXPECT_EQ(b.overrides, 0);
  EXPECT_EQ(b.executed_violations, 0);
  for (const auto& e : b.episodes) {
    for (double v : e.battery_consumption) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Harness, PlannerOnlyFailsSomewhere) {
  ExperimentConfig c;
  c.mode = RunMode::kPlannerOnly;
  c.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
  const MetricsBundle b = run_experiment(c, false);
  int short_seeds = 0;
  for (const auto& e : b.episodes) short_seeds += e.success_rate < 1.0;
  EXPECT_GT(short_seeds, 0);
  EXPECT_GT(b.executed_violations, 0);
}

TEST(Harness, PairedComparison) {
  ExperimentConfig c;
  c.seeds.clear();
  for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
  const Comparison r = compare(c, false);
  EXPECT_TRUE(r.layouts_match);
  ASSERT_EQ(r.planner_only.episodes.size(), r.safeguarded.episodes.size());
  for (std::size_t i = 0; i < r.safeguarded.episodes.size(); ++i) {
    EXPECT_GE(r.safeguarded.episodes[i].success_rate, r.planner_only.episodes[i].success_rate);
  }
  EXPECT_LT(r.safeguarded.battery.mean, r.planner_only.battery.mean);
  EXPECT_EQ(r.safeguarded.executed_violations, 0);
}

TEST(Harness, OutputsAreByteIdentical) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  run_experiment(small_config(RunMode::kPlannerOnly, a));
  run_experiment(small_config(RunMode::kPlannerOnly, b));
  for (const char* f : {"episodes.csv", "drones.csv", "summary.json", "trajectory.jsonl"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Harness, TrajectoryReproducesSuccess) {
  const fs::path out = scratch("traj");
  const MetricsBundle b = run_experiment(small_config(RunMode::kPlannerOnly, out));
  const auto lines = lines_of(out / "trajectory.jsonl");
  const auto rebuilt = success_from_trajectory(lines, b.episodes);
  ASSERT_EQ(rebuilt.size(), b.episodes.size());
  for (std::size_t i = 0; i < rebuilt.size(); ++i) EXPECT_EQ(rebuilt[i], b.episodes[i].success_rate);
  const auto first = nlohmann::json::parse(lines.front());
  for (const char* key : {"t", "drone_id", "x", "y", "soc", "mode", "action", "overridden", "reward"}) {
    EXPECT_TRUE(first.contains(key)) << key;
  }
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_TRUE(summary.contains("success_rate"));
  fs::remove_all(out);
}

TEST(Harness, AuditTableListsClasses) {
  ExperimentConfig c;
  c.mode = RunMode::kPlannerOnly;
  c.seeds = {4, 5};
  const MetricsBundle b = run_experiment(c, false);
  const std::string table = audit_table(b.hallucinations);
  for (const char* cls : {"duplicate", "battery", "route", "sector", "total"}) {
    EXPECT_NE(table.find(cls), std::string::npos) << cls;
  }
}

TEST(Cli, PowerAtHover) {
  const CliResult r = run_cli("power --speed 0", "power");
  ASSERT_EQ(r.status, 0) << r.output;
  const auto pos = r.output.find("total");
  ASSERT_NE(pos, std::string::npos);
  const double total = std::strtod(r.output.c_str() + pos + 5, nullptr);
  EXPECT_NEAR(total, 6.369e5, 0.0001e5);
}

TEST(Cli, MissingConfigFails) {
  const CliResult r = run_cli("simulate --config missing.file", "missing");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("missing.file"), std::string::npos) << r.output;
}

TEST(Cli, UnknownFlagFails) {
  const CliResult r = run_cli("simulate --bogus 3", "bogus");
  EXPECT_NE(r.status, 0);
}

TEST(Cli, CompareWritesSummary) {
  const fs::path out = scratch("cli_compare");
  const CliResult r = run_cli("compare --seed 7 --episodes 50 --out " + out.string(), "compare");
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(out / "compare.json"));
  EXPECT_TRUE(j.at("layouts_match").get<bool>());
  EXPECT_TRUE(j.contains("planner_only"));
  EXPECT_TRUE(j.contains("safeguarded"));
  EXPECT_EQ(j.at("paired").size(), 50u);
  EXPECT_TRUE(fs::exists(out / "planner_only" / "episodes.csv"));
  EXPECT_TRUE(fs::exists(out / "safeguarded" / "summary.json"));
  fs::remove_all(out);
}
