// Command-line front end: simulate, train, compare, audit, power.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "dronesafe/config.hpp"
#include "dronesafe/energy.hpp"
#include "dronesafe/harness.hpp"
#include "dronesafe/rl.hpp"

using namespace dronesafe;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> mode;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_mode) {
  cmd->add_option("--config", f.config_path, "experiment config (JSON)");
  cmd->add_option("--seed", f.seed, "single seed, replaces the config's seed list");
  cmd->add_option("--episodes", f.episodes, "episodes per seed");
  if (with_mode) cmd->add_option("--mode", f.mode, "planner_only or safeguarded");
  cmd->add_option("--out", f.out, "output directory");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  if (f.seed) c.seeds = {*f.seed};
  if (f.episodes) c.episodes = *f.episodes;
  if (f.mode) c.mode = parse_run_mode(*f.mode);
  if (f.out) c.output_dir = *f.out;
  c.validate();
  return c;
}

void print_summary(const MetricsBundle& b) {
  fmt::print("{:<13} episodes={} success={:.4f}±{:.4f} battery={:.4f}±{:.4f} distance={:.1f}±{:.1f} overrides={}\n",
             run_mode_name(b.mode), b.episodes.size(), b.success_rate.mean, b.success_rate.std, b.battery.mean,
             b.battery.std, b.distance.mean, b.distance.std, b.overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shielded multi-drone delivery simulator"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "run one experiment");
  add_common(sim, sim_flags, true);

  CommonFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "train the constrained actor-critic");
  add_common(train_cmd, train_flags, false);

  CommonFlags cmp_flags;
  auto* cmp = app.add_subcommand("compare", "planner_only vs safeguarded on paired seeds");
  add_common(cmp, cmp_flags, false);

  CommonFlags audit_flags;
  auto* audit_cmd = app.add_subcommand("audit", "hallucination table for one experiment");
  add_common(audit_cmd, audit_flags, true);

  double speed = 0.0;
  std::string power_config;
  auto* power = app.add_subcommand("power", "rotorcraft power at a given airspeed");
  power->add_option("--speed", speed, "airspeed in m/s")->required();
  power->add_option("--config", power_config, "take aircraft parameters from this config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ExperimentConfig c = resolve(sim_flags);
      print_summary(run_experiment(c));
      fmt::print("outputs written to {}\n", c.output_dir);
    } else if (*cmp) {
      const ExperimentConfig c = resolve(cmp_flags);
      const Comparison r = compare(c);
      print_summary(r.planner_only);
      print_summary(r.safeguarded);
      fmt::print("layouts match: {}\nsummary written to {}/compare.json\n", r.layouts_match ? "yes" : "no",
                 c.output_dir);
      if (!r.layouts_match) return 3;
    } else if (*audit_cmd) {
      ExperimentConfig c = resolve(audit_flags);
      const MetricsBundle b = run_experiment(c, false);
      fmt::print("{}", audit_table(b.hallucinations));
    } else if (*train_cmd) {
      const ExperimentConfig c = resolve(train_flags);
      auto planner = make_planner(c);
      const TrainResult r = train(c.world, *planner, c.constraints, c.rl, c.episodes, c.seeds.front());
      std::filesystem::create_directories(c.output_dir);
      r.log.write_csv(c.output_dir + "/training.csv");
      save_checkpoint(c.output_dir + "/checkpoint.bin", r.policy, r.critics, r.lagrange);
      if (!r.log.episodes.empty()) {
        const EpisodeLog& last = r.log.episodes.back();
        fmt::print("episodes={} reward_ma={:.3f} updates={} rejected={}{}\n", r.log.episodes.size(), last.reward_ma,
                   r.log.updates, r.log.rejected_updates, r.log.halted ? " (halted)" : "");
      }
      fmt::print("lambda = [{:.5f}, {:.5f}, {:.5f}, {:.5f}]\n", r.lagrange.lambda[0], r.lagrange.lambda[1],
                 r.lagrange.lambda[2], r.lagrange.lambda[3]);
      fmt::print("log and checkpoint written to {}\n", c.output_dir);
    } else if (*power) {
      const AircraftParams a = power_config.empty() ? AircraftParams{} : load_config(power_config).world.aircraft;
      a.validate();
      const PowerBreakdown p = propulsion_power_terms(speed, a);
      fmt::print("speed         {} m/s\n", speed);
      fmt::print("blade profile {:.6e} W\n", p.blade_profile);
      fmt::print("induced       {:.6e} W\n", p.induced);
      fmt::print("parasite      {:.6e} W\n", p.parasite);
      fmt::print("total         {:.6e} W\n", p.total());
      if (speed > 0.0) fmt::print("energy        {:.6e} kWh/m\n", p.total() / speed / kJoulesPerKwh);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
