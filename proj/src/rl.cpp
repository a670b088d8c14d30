#include "dronesafe/rl.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace dronesafe {

void RlConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
  if (!(entropy_bonus >= 0.0)) throw std::invalid_argument("entropy_bonus must be non-negative");
  if (!(policy_lr > 0.0) || !(critic_lr > 0.0) || !(lambda_lr >= 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (batch_size <= 0 || update_period <= 0 || hidden <= 0) {
    throw std::invalid_argument("batch size, update period and hidden width must be positive");
  }
  if (replay_capacity < batch_size) throw std::invalid_argument("replay capacity below the batch size");
  if (memory_capacity <= 0 || memory_window < 0) throw std::invalid_argument("bad planner memory size");
  if (target_sync < 0) throw std::invalid_argument("target_sync must be non-negative");
  if (warmup_episodes < 0 || max_rejections <= 0) throw std::invalid_argument("bad warm-up or rejection limit");
  for (double b : cost_budget) {
    if (!(b >= 0.0)) throw std::invalid_argument("cost budgets must be non-negative");
  }
}

namespace {

bool allowed(ActionMask mask, int i) { return i < 64 && ((mask >> i) & 1U) != 0; }

Eigen::MatrixXd stack_states(std::span<const RlTransition> batch, bool next) {
  Eigen::MatrixXd x(Observation::kSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) = (next ? batch[i].s_next : batch[i].s).to_vector();
  }
  return x;
}

}  // namespace

Eigen::VectorXd masked_softmax(const Eigen::VectorXd& logits, ActionMask mask) {
  const Eigen::Index n = logits.size();
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (allowed(mask, static_cast<int>(i))) top = std::max(top, logits[i]);
  }
  if (!std::isfinite(top)) throw std::invalid_argument("softmax over an empty or non-finite action set");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!allowed(mask, static_cast<int>(i))) continue;
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  return p / sum;
}

int greedy_index(const Eigen::VectorXd& logits, ActionMask mask) {
  int best = -1;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (!allowed(mask, static_cast<int>(i))) continue;
    if (best < 0 || logits[i] > logits[best]) best = static_cast<int>(i);
  }
  if (best < 0) throw std::invalid_argument("no allowed action");
  return best;
}

Policy::Policy(int hidden) : net_({Observation::kSize, hidden, hidden, kPolicySlotCount}) {}

Eigen::VectorXd Policy::logits(const Eigen::VectorXd& x) const { return net_.forward(x).col(0); }

Eigen::VectorXd Policy::probabilities(const Eigen::VectorXd& x, ActionMask mask) const {
  return masked_softmax(logits(x), mask);
}

Policy::Sample Policy::act(const Eigen::VectorXd& x, Rng& rng, ActionMask mask, bool greedy) const {
  const Eigen::VectorXd z = logits(x);
  const Eigen::VectorXd p = masked_softmax(z, mask);
  Sample s;
  if (greedy) {
    s.action = greedy_index(z, mask);
  } else {
    std::discrete_distribution<int> dist(p.data(), p.data() + p.size());
    s.action = dist(rng);
  }
  s.log_probability = std::log(p[s.action]);
  return s;
}

Critics Critics::make(int input, int actions, int hidden, Rng& rng) {
  Critics c{Mlp({input, hidden, hidden, actions}), Mlp({input, hidden, hidden, kConstraintCount * actions})};
  c.reward.init(rng, 0.1);
  c.safety.init(rng, 0.1);
  return c;
}

void lagrange_update(LagrangeState& state, std::span<const RlTransition> batch,
                     const std::array<double, kConstraintCount>& thresholds) {
  if (batch.empty()) return;
  for (std::size_t k = 0; k < kConstraintCount; ++k) {
    double mean = 0.0;
    for (const RlTransition& t : batch) mean += t.costs[k];
    mean /= static_cast<double>(batch.size());
    state.lambda[k] = std::max(0.0, state.lambda[k] + state.step_size * (mean - thresholds[k]));
  }
}

std::array<double, kPolicySlotCount> CriticScorer::score(const Observation& obs) const {
  const Eigen::VectorXd x = obs.to_vector();
  const Eigen::VectorXd q = critics_.q(x).col(0);
  const Eigen::VectorXd qc = critics_.q_cost(x).col(0);
  std::array<double, kPolicySlotCount> out{};
  for (int a = 0; a < kPolicySlotCount; ++a) {
    double v = q[a];
    for (int k = 0; k < kConstraintCount; ++k) {
      v -= lagrange_.lambda[static_cast<std::size_t>(k)] * qc[k * kPolicySlotCount + a];
    }
    out[static_cast<std::size_t>(a)] = v;
  }
  return out;
}

double policy_surrogate(const Policy& policy, const PolicyBatch& batch) {
  const Eigen::MatrixXd z = policy.net().forward(batch.states);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Eigen::VectorXd p = masked_softmax(z.col(i), batch.masks[idx]);
    total += batch.advantages[i] * std::log(p[batch.actions[idx]]);
    if (batch.entropy != 0.0) {
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) total -= batch.entropy * p[j] * std::log(p[j]);
      }
    }
  }
  return total / static_cast<double>(z.cols());
}

Eigen::VectorXd policy_gradient(const Policy& policy, const PolicyBatch& batch) {
  Mlp::Tape tape;
  const Eigen::MatrixXd z = policy.net().forward(batch.states, &tape);
  const double n = static_cast<double>(z.cols());
  Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.cols(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    // d log softmax_a / dz = onehot(a) - p over the allowed entries.
    const Eigen::VectorXd p = masked_softmax(z.col(i), batch.masks[idx]);
    Eigen::VectorXd g = -p;
    g[batch.actions[idx]] += 1.0;
    g *= batch.advantages[i];
    if (batch.entropy != 0.0) {
      // dH/dz_j = -p_j (log p_j + H)
      double h = 0.0;
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) h -= p[j] * std::log(p[j]);
      }
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) g[j] -= batch.entropy * p[j] * (std::log(p[j]) + h);
      }
    }
    dz.col(i) = g / n;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.net().parameter_count());
  policy.net().backward(tape, dz, grad);
  return grad;
}

PolicyBatch make_policy_batch(const Policy& policy, const Critics& critics, const LagrangeState& lagrange,
                              std::span<const RlTransition> batch, double eta) {
  PolicyBatch pb;
  pb.states = stack_states(batch, false);
  const Eigen::MatrixXd z = policy.net().forward(pb.states);
  const Eigen::MatrixXd q = critics.q(pb.states);
  const Eigen::MatrixXd qc = critics.q_cost(pb.states);
  const int slots = critics.action_count();
  pb.advantages.resize(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const RlTransition& t = batch[i];
    Eigen::VectorXd value = q.col(col);
    for (int k = 0; k < kConstraintCount; ++k) {
      value -= lagrange.lambda[static_cast<std::size_t>(k)] * qc.col(col).segment(k * slots, slots);
    }
    const Eigen::VectorXd p = masked_softmax(z.col(col), t.mask);
    pb.actions.push_back(t.action);
    pb.masks.push_back(t.mask);
    double adv = value[t.action] - p.dot(value);
    if (t.proposed >= 0 && t.proposed != t.action) adv -= eta;
    pb.advantages[col] = adv;
  }
  return pb;
}

bool policy_gradient_step(Policy& policy, const Critics& critics, const LagrangeState& lagrange,
                          std::span<const RlTransition> batch, const RlConfig& config) {
  if (batch.empty()) return true;
  PolicyBatch pb = make_policy_batch(policy, critics, lagrange, batch, config.eta);
  pb.entropy = config.entropy_bonus;
  const Eigen::VectorXd grad = policy_gradient(policy, pb);
  if (!grad.allFinite()) return false;
  policy.net().parameters() += config.policy_lr * grad;
  return true;
}

std::optional<CriticLoss> critic_update(Critics& critics, const Policy& policy, std::span<const RlTransition> batch,
                                        const RlConfig& config, const Critics* target) {
  if (batch.empty()) return CriticLoss{};
  const Critics& boot = target ? *target : critics;
  const int slots = critics.action_count();
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::MatrixXd s = stack_states(batch, false);
  const Eigen::MatrixXd s_next = stack_states(batch, true);

  // Bootstrap values under pi(.|s') restricted to the slots open in s'.
  const Eigen::MatrixXd z_next = policy.net().forward(s_next);
  const Eigen::MatrixXd q_next = boot.q(s_next);
  const Eigen::MatrixXd qc_next = boot.q_cost(s_next);
  Eigen::VectorXd y(n);
  Eigen::MatrixXd yc(kConstraintCount, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const RlTransition& t = batch[static_cast<std::size_t>(i)];
    const bool bootstrap = !t.done && t.next_mask != 0;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(slots);
    if (bootstrap) p = masked_softmax(z_next.col(i), t.next_mask);
    y[i] = t.reward + (bootstrap ? config.gamma * p.dot(q_next.col(i)) : 0.0);
    for (int k = 0; k < kConstraintCount; ++k) {
      const double tail = bootstrap ? config.gamma * p.dot(qc_next.col(i).segment(k * slots, slots)) : 0.0;
      yc(k, i) = t.costs[static_cast<std::size_t>(k)] + tail;
    }
  }

  Mlp::Tape tape_r;
  Mlp::Tape tape_c;
  const Eigen::MatrixXd q = critics.reward.forward(s, &tape_r);
  const Eigen::MatrixXd qc = critics.safety.forward(s, &tape_c);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), n);
  Eigen::MatrixXd dqc = Eigen::MatrixXd::Zero(qc.rows(), n);
  CriticLoss loss;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = batch[static_cast<std::size_t>(i)].action;
    const double err = q(a, i) - y[i];
    loss.reward += 0.5 * err * err * inv_n;
    dq(a, i) = err * inv_n;
    for (int k = 0; k < kConstraintCount; ++k) {
      const double e = qc(k * slots + a, i) - yc(k, i);
      loss.safety += 0.5 * e * e * inv_n;
      dqc(k * slots + a, i) = e * inv_n;
    }
  }
  Eigen::VectorXd grad_r = Eigen::VectorXd::Zero(critics.reward.parameter_count());
  Eigen::VectorXd grad_c = Eigen::VectorXd::Zero(critics.safety.parameter_count());
  critics.reward.backward(tape_r, dq, grad_r);
  critics.safety.backward(tape_c, dqc, grad_c);
  if (!grad_r.allFinite() || !grad_c.allFinite()) return std::nullopt;
  critics.reward.parameters() -= config.critic_lr * grad_r;
  critics.safety.parameters() -= config.critic_lr * grad_c;
  return loss;
}

// --- Monte-Carlo constraint value over the world ---

WorldCostProcess::WorldCostProcess(const Policy& policy, const World& start, Constraint constraint,
                                   ConstraintConfig constraints)
    : policy_(policy),
      config_(start.config()),
      start_(start.state()),
      constraint_(constraint),
      constraints_(constraints) {}

void WorldCostProcess::reset() { world_.emplace(config_, start_); }

CostStep WorldCostProcess::step(Rng& rng) {
  if (!world_) reset();
  World& w = *world_;
  CostStep out;
  for (DroneId i = 0; i < static_cast<DroneId>(w.state().drones.size()); ++i) {
    if (!w.needs_decision(i)) {
      w.apply(i, Action::local_idle());
      continue;
    }
    const std::uint8_t mask = applicable_slots(w, i);
    const auto sample = policy_.act(w.observe(i).to_vector(), rng, mask);
    const Action chosen = *action_for_slot(w, i, static_cast<PolicySlot>(sample.action));
    const ConstraintReport report = evaluate_constraints(w, i, chosen, constraints_);
    out.cost += report.hinge(constraint_);
    const OverrideOutcome o = filter_action(w, i, chosen, FallbackSource::ladder(), constraints_);
    w.apply(i, o.executed);
  }
  w.end_step();
  out.done = w.is_terminal();
  return out;
}

SafetyValueEstimate estimate_safety_value(const Policy& policy, const World& start, Constraint constraint,
                                          double gamma, int n_rollouts, int horizon, std::uint64_t seed,
                                          const ConstraintConfig& constraints) {
  WorldCostProcess process(policy, start, constraint, constraints);
  return estimate_safety_value(process, gamma, n_rollouts, horizon, seed);
}

// --- training ---

void TrainingLog::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write training log " + path);
  os << "episode,reward,reward_ma,cost_battery,cost_duplicate,cost_route,cost_sector,overrides,battery_mean,"
        "distance_total,served,customers,lambda_battery,lambda_duplicate,lambda_route,lambda_sector\n";
  for (const EpisodeLog& e : episodes) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", e.episode, e.reward, e.reward_ma, e.cost[0],
                      e.cost[1], e.cost[2], e.cost[3], e.overrides, e.battery_mean, e.distance_total, e.served,
                      e.customers, e.lambda[0], e.lambda[1], e.lambda[2], e.lambda[3]);
  }
}

namespace {

double energy_share(const WorldConfig& config, const DroneState& d) {
  return d.energy_consumed_kwh / (config.battery.capacity_kwh + d.energy_charged_kwh);
}

}  // namespace

TrainResult train(const WorldConfig& world_config, Planner& planner, const ConstraintConfig& constraints,
                  const RlConfig& config, int episodes, std::uint64_t seed) {
  world_config.validate();
  constraints.validate();
  config.validate();

  std::seed_seq init_seq{seed, std::uint64_t{0x5eed}};
  Rng rng(init_seq);
  Policy policy(config.hidden);
  policy.net().init(rng, 0.1);
  Critics critics = Critics::make(Observation::kSize, kPolicySlotCount, config.hidden, rng);
  LagrangeState lagrange;
  lagrange.step_size = config.lambda_lr;

  TrainResult result{std::move(policy), std::move(critics), lagrange, {}};
  TrainingLog& log = result.log;
  Policy& pi = result.policy;
  Critics& q = result.critics;
  LagrangeState& lam = result.lagrange;
  log.min_lambda = lam.lambda;

  RlReplay replay(static_cast<std::size_t>(config.replay_capacity));
  PlannerMemory memory(static_cast<std::size_t>(config.memory_capacity));
  const CriticScorer scorer(q, lam);
  std::deque<double> window;
  double window_sum = 0.0;
  int consecutive_rejections = 0;
  Critics target = q;
  int since_sync = 0;

  for (int ep = 0; ep < episodes && !log.halted; ++ep) {
    std::seed_seq ep_seq{seed, static_cast<std::uint64_t>(ep)};
    std::uint64_t ep_seed = 0;
    {
      std::array<std::uint32_t, 2> words{};
      ep_seq.generate(words.begin(), words.end());
      ep_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    }
    World world(world_config, ep_seed);
    planner.reset(ep_seed);
    const FallbackSource source =
        ep >= config.warmup_episodes ? FallbackSource::policy(scorer) : FallbackSource::ladder();

    const auto drones = static_cast<std::size_t>(world_config.grid.drone_count);
    std::vector<std::optional<RlTransition>> open(drones);
    EpisodeLog entry;
    entry.episode = ep;
    entry.customers = static_cast<int>(world.state().customers.size());

    auto flush = [&](std::size_t i, const Observation& next, std::uint8_t next_mask, bool done) {
      if (!open[i]) return;
      RlTransition t = *open[i];
      t.s_next = next;
      t.next_mask = next_mask;
      t.done = done;
      replay.push(t);
      open[i].reset();
    };

    while (!world.is_terminal() && !log.halted) {
      for (std::size_t i = 0; i < drones; ++i) {
        const auto id = static_cast<DroneId>(i);
        if (!world.needs_decision(id)) {
          const DroneOutcome o = world.apply(id, Action::local_idle());
          if (open[i]) open[i]->reward += o.reward;
          entry.reward += o.reward;
          continue;
        }
        const Observation obs = world.observe(id);
        const std::uint8_t mask = applicable_slots(world, id);
        flush(i, obs, mask, false);

        const auto recent = memory.recent_window(static_cast<std::size_t>(config.memory_window));
        const PlannerContext ctx{world, id, recent};
        const PlannerProposal proposal = planner.propose(ctx);
        const ConstraintReport proposal_report = evaluate_constraints(world, id, proposal.proposed, constraints);

        const Policy::Sample sample = pi.act(obs.to_vector(), rng, mask);
        const Action chosen = *action_for_slot(world, id, static_cast<PolicySlot>(sample.action));
        const OverrideOutcome filtered = filter_action(world, id, chosen, source, constraints);

        PlannerRecord record;
        record.drone = id;
        record.t = world.state().t;
        record.s = obs;
        record.proposed = proposal.proposed;
        record.override_flag = proposal.proposed.is_pass() || !proposal_report.feasible();
        if (proposal.proposed.is_pass()) {
          record.fault_class = proposal.parse_failure ? HallucinationClass::kParseFailure : HallucinationClass::kPass;
        } else if (const auto worst = proposal_report.worst()) {
          record.fault_class = to_hallucination(*worst);
        }
        memory.push(record);

        const DroneOutcome outcome = world.apply(id, filtered.executed);
        entry.reward += outcome.reward;
        if (filtered.overridden) ++entry.overrides;

        RlTransition t;
        t.s = obs;
        t.action = sample.action;
        t.reward = outcome.reward;
        t.costs = filtered.report.hinge_costs();
        t.mask = mask;
        const auto proposed_slot = slot_of(proposal.proposed);
        t.proposed = proposed_slot ? static_cast<int>(*proposed_slot) : -1;
        for (std::size_t k = 0; k < kConstraintCount; ++k) entry.cost[k] += t.costs[k];
        open[i] = t;
        if (world.drone(id).mode == DroneMode::kDepleted) flush(i, world.observe(id), 0, true);
      }
      world.end_step();
      ++entry.steps;

      if (entry.steps % config.update_period == 0 && replay.size() >= static_cast<std::size_t>(config.batch_size)) {
        const auto batch = replay.sample_minibatch(static_cast<std::size_t>(config.batch_size), rng);
        const auto closs = critic_update(q, pi, batch, config, config.target_sync > 0 ? &target : nullptr);
        const bool ok = closs.has_value() && policy_gradient_step(pi, q, lam, batch, config);
        if (ok) {
          lagrange_update(lam, batch, config.cost_budget);
          for (std::size_t k = 0; k < kConstraintCount; ++k) {
            log.min_lambda[k] = std::min(log.min_lambda[k], lam.lambda[k]);
          }
          ++log.updates;
          if (config.target_sync > 0 && ++since_sync >= config.target_sync) {
            target = q;
            since_sync = 0;
          }
          consecutive_rejections = 0;
        } else {
          ++log.rejected_updates;
          if (++consecutive_rejections >= config.max_rejections) log.halted = true;
        }
      }
    }
    for (std::size_t i = 0; i < drones; ++i) {
      const auto id = static_cast<DroneId>(i);
      flush(i, world.observe(id), 0, true);
    }

    double share = 0.0;
    for (const DroneState& d : world.state().drones) {
      share += energy_share(world_config, d);
      entry.distance_total += d.cumulative_distance;
    }
    entry.battery_mean = share / static_cast<double>(drones);
    entry.served = world.served_count();
    entry.lambda = lam.lambda;
    window.push_back(entry.reward);
    window_sum += entry.reward;
    if (window.size() > 100) {
      window_sum -= window.front();
      window.pop_front();
    }
    entry.reward_ma = window_sum / static_cast<double>(window.size());
    log.episodes.push_back(entry);
  }
  return result;
}

// --- checkpoints ---

namespace {

constexpr char kCheckpointMagic[4] = {'D', 'S', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

void put_net(std::ostream& os, const Mlp& net) {
  put<std::uint32_t>(os, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) put<std::int32_t>(os, s);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(net.parameter_count()));
  os.write(reinterpret_cast<const char*>(net.parameters().data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(net.parameter_count())));
}

Mlp get_net(std::istream& is) {
  const auto layers = get<std::uint32_t>(is);
  if (layers < 2 || layers > 64) throw std::runtime_error("checkpoint has a bad layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < layers; ++i) sizes.push_back(get<std::int32_t>(is));
  Mlp net(sizes);
  const auto n = get<std::uint64_t>(is);
  if (n != static_cast<std::uint64_t>(net.parameter_count())) {
    throw std::runtime_error("checkpoint parameter count does not match its layer sizes");
  }
  is.read(reinterpret_cast<char*>(net.parameters().data()), static_cast<std::streamsize>(sizeof(double) * n));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return net;
}

}  // namespace

void save_checkpoint(const std::string& path, const Policy& policy, const Critics& critics,
                     const LagrangeState& lagrange) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path);
  os.write(kCheckpointMagic, 4);
  put<std::uint32_t>(os, kCheckpointVersion);
  put_net(os, policy.net());
  put_net(os, critics.reward);
  put_net(os, critics.safety);
  for (double l : lagrange.lambda) put<double>(os, l);
  put<double>(os, lagrange.step_size);
  if (!os) throw std::runtime_error("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0) throw std::runtime_error("not a checkpoint: " + path);
  if (get<std::uint32_t>(is) != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
  Mlp policy = get_net(is);
  Mlp reward = get_net(is);
  Mlp safety = get_net(is);
  LagrangeState lagrange;
  for (double& l : lagrange.lambda) l = get<double>(is);
  lagrange.step_size = get<double>(is);
  return {Policy(std::move(policy)), Critics{std::move(reward), std::move(safety)}, lagrange};
}

}  // namespace dronesafe
