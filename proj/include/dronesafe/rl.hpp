#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dronesafe/nn.hpp"
#include "dronesafe/planner.hpp"
#include "dronesafe/replay.hpp"
#include "dronesafe/safety.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

// Bit i set when action i may be chosen.
using ActionMask = std::uint64_t;
inline constexpr ActionMask kAllActions = ~ActionMask{0};

struct RlConfig {
  double gamma = 0.99;
  double eta = 0.1;  // weight of the deviation-from-proposal penalty
  double entropy_bonus = 0.1;  // weight of the policy entropy in the actor objective
  double policy_lr = 1e-3;
  double critic_lr = 1e-3;
  double lambda_lr = 0.05;
  int batch_size = 64;
  int update_period = 5;  // world steps between updates
  int replay_capacity = 100000;
  int memory_capacity = 512;
  int memory_window = 16;  // planner records shown per proposal
  int hidden = 64;
  // Updates between copies of the critics into the bootstrap target; 0 bootstraps from the live critics.
  int target_sync = 500;
  // Episodes before the critics drive the fallback.
  int warmup_episodes = 50;
  std::array<double, kConstraintCount> cost_budget{0.001, 0.001, 0.001, 0.001};
  // Consecutive rejected updates before training stops.
  int max_rejections = 20;

  void validate() const;
};

// Softmax over the allowed entries; disallowed entries get probability 0.
Eigen::VectorXd masked_softmax(const Eigen::VectorXd& logits, ActionMask mask = kAllActions);
// Largest allowed logit, lowest index on ties.
int greedy_index(const Eigen::VectorXd& logits, ActionMask mask = kAllActions);

class Policy {
 public:
  // Observation -> hidden -> hidden -> slot logits.
  explicit Policy(int hidden = 64);
  explicit Policy(Mlp net) : net_(std::move(net)) {}

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }
  int action_count() const { return net_.output_size(); }

  Eigen::VectorXd logits(const Eigen::VectorXd& x) const;
  Eigen::VectorXd probabilities(const Eigen::VectorXd& x, ActionMask mask = kAllActions) const;

  struct Sample {
    int action = 0;
    double log_probability = 0.0;
  };
  Sample act(const Eigen::VectorXd& x, Rng& rng, ActionMask mask = kAllActions, bool greedy = false) const;

 private:
  Mlp net_;
};

// Reward critic with one head per slot, safety critic with one head per
// (constraint, slot) pair at row k * slots + a.
struct Critics {
  Mlp reward;
  Mlp safety;

  static Critics make(int input, int actions, int hidden, Rng& rng);
  int action_count() const { return reward.output_size(); }
  Eigen::MatrixXd q(const Eigen::MatrixXd& states) const { return reward.forward(states); }
  Eigen::MatrixXd q_cost(const Eigen::MatrixXd& states) const { return safety.forward(states); }
};

struct LagrangeState {
  std::array<double, kConstraintCount> lambda{};
  double step_size = 1e-2;
};

// lambda_k <- max(0, lambda_k + step * (mean batch cost_k - b_k)).
void lagrange_update(LagrangeState& state, std::span<const RlTransition> batch,
                     const std::array<double, kConstraintCount>& thresholds);

// Q - lambda^T Q_c per slot, for the shield's policy-mode fallback.
class CriticScorer : public ActionScorer {
 public:
  CriticScorer(const Critics& critics, const LagrangeState& lagrange) : critics_(critics), lagrange_(lagrange) {}
  std::array<double, kPolicySlotCount> score(const Observation& obs) const override;

 private:
  const Critics& critics_;
  const LagrangeState& lagrange_;
};

// Samples and fixed advantages for the score-function surrogate
// J = mean_i [A_i log pi(a_i | s_i) + entropy * H(pi(. | s_i))].
struct PolicyBatch {
  Eigen::MatrixXd states;  // columns are samples
  std::vector<int> actions;
  std::vector<ActionMask> masks;
  Eigen::VectorXd advantages;
  double entropy = 0.0;
};

double policy_surrogate(const Policy& policy, const PolicyBatch& batch);
Eigen::VectorXd policy_gradient(const Policy& policy, const PolicyBatch& batch);

// Advantage per sample: (Q - lambda^T Q_c)(s, a) minus its expectation under
// pi(.|s), minus eta when a differs from the planner's slot.
PolicyBatch make_policy_batch(const Policy& policy, const Critics& critics, const LagrangeState& lagrange,
                              std::span<const RlTransition> batch, double eta);

// Gradient ascent on the surrogate. Returns false, leaving the policy
// untouched, when the gradient is not finite.
bool policy_gradient_step(Policy& policy, const Critics& critics, const LagrangeState& lagrange,
                          std::span<const RlTransition> batch, const RlConfig& config);

struct CriticLoss {
  double reward = 0.0;
  double safety = 0.0;
};

// One TD step toward r + gamma * E_{a'~pi}[Q(s', a')] and the same for each
// cost head. Bootstraps from `target` when given, else from the critics
// themselves. nullopt (and no change) when the gradient is not finite.
std::optional<CriticLoss> critic_update(Critics& critics, const Policy& policy, std::span<const RlTransition> batch,
                                        const RlConfig& config, const Critics* target = nullptr);

// --- Monte-Carlo constraint value ---

struct CostStep {
  double cost = 0.0;
  bool done = false;
};

template <class P>
concept CostProcess = requires(P& p, Rng& rng) {
  p.reset();
  { p.step(rng) } -> std::same_as<CostStep>;
};

struct SafetyValueEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int rollouts = 0;
};

// Mean over rollouts of sum_t gamma^t c_t, each rollout restarting from the
// process's start state.
template <CostProcess P>
SafetyValueEstimate estimate_safety_value(P& process, double gamma, int n_rollouts, int horizon,
                                          std::uint64_t seed) {
  Rng rng(seed);
  SafetyValueEstimate est;
  est.rollouts = n_rollouts;
  if (n_rollouts <= 0) return est;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < n_rollouts; ++r) {
    process.reset();
    double discount = 1.0;
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const CostStep s = process.step(rng);
      total += discount * s.cost;
      discount *= gamma;
      if (s.done) break;
    }
    sum += total;
    sum_sq += total * total;
  }
  const double n = n_rollouts;
  est.mean = sum / n;
  if (n_rollouts > 1) {
    const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.standard_error = std::sqrt(var / n);
  }
  return est;
}

// Fleet rollout under a policy: every deciding drone samples a slot, the
// cost is the summed hinge of constraint `constraint` over the sampled
// actions, and the ladder-shielded actions are executed.
class WorldCostProcess {
 public:
  WorldCostProcess(const Policy& policy, const World& start, Constraint constraint,
                   ConstraintConfig constraints = {});
  void reset();
  CostStep step(Rng& rng);

 private:
  const Policy& policy_;
  WorldConfig config_;
  WorldState start_;
  Constraint constraint_;
  ConstraintConfig constraints_;
  std::optional<World> world_;
};

SafetyValueEstimate estimate_safety_value(const Policy& policy, const World& start, Constraint constraint,
                                          double gamma, int n_rollouts, int horizon, std::uint64_t seed,
                                          const ConstraintConfig& constraints = {});

// --- training loop ---

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;     // summed over drones
  double reward_ma = 0.0;  // trailing mean over up to 100 episodes
  std::array<double, kConstraintCount> cost{};  // summed hinge cost of the actor's actions
  int overrides = 0;
  double battery_mean = 0.0;  // mean energy share used per drone
  double distance_total = 0.0;
  int served = 0;
  int customers = 0;
  int steps = 0;
  std::array<double, kConstraintCount> lambda{};  // multipliers at episode end

  double total_cost() const { return cost[0] + cost[1] + cost[2] + cost[3]; }
};

struct TrainingLog {
  std::vector<EpisodeLog> episodes;
  std::array<double, kConstraintCount> min_lambda{};  // smallest value seen after any update
  long updates = 0;
  long rejected_updates = 0;
  bool halted = false;

  void write_csv(const std::string& path) const;
};

struct TrainResult {
  Policy policy;
  Critics critics;
  LagrangeState lagrange;
  TrainingLog log;
};

// Integrated loop: the policy picks a slot for every deciding drone, the
// shield filters it, the planner's proposal enters through the deviation
// penalty, both buffers are filled, and the critics, policy and multipliers
// are updated every update_period steps.
TrainResult train(const WorldConfig& world_config, Planner& planner, const ConstraintConfig& constraints,
                  const RlConfig& config, int episodes, std::uint64_t seed);

// Binary checkpoint. Layout (little-endian):
//   char[4] "DSCK", u32 version (=1),
//   3 x { u32 layer count, i32[layer count] sizes, u64 n, f64[n] params }
//     for the policy, reward critic and safety critic,
//   f64[4] lambda, f64 lambda step size
void save_checkpoint(const std::string& path, const Policy& policy, const Critics& critics,
                     const LagrangeState& lagrange);
struct Checkpoint {
  Policy policy;
  Critics critics;
  LagrangeState lagrange;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dronesafe
