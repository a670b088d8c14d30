#include "dronesafe/planner.hpp"

#include <cmath>
#include <stdexcept>

namespace dronesafe {

std::string_view fault_name(FaultClass f) {
  switch (f) {
    case FaultClass::kDuplicateVisit:
      return "duplicate_visit";
    case FaultClass::kBatteryIgnore:
      return "battery_ignore";
    case FaultClass::kInefficientRoute:
      return "inefficient_route";
    case FaultClass::kSectorImbalance:
      return "sector_imbalance";
  }
  return "unknown";
}

void FaultConfig::validate() const {
  for (double r : {duplicate_visit, battery_ignore, inefficient_route, sector_imbalance}) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("fault rates must lie in [0, 1]");
  }
  if (total() > 1.0 + 1e-12) throw std::invalid_argument("fault rates must sum to at most 1");
}

PlannerProposal MockPlanner::propose(const PlannerContext& ctx) {
  return ctx.world.tier_of(ctx.drone) == Tier::kGlobal ? propose_global(ctx) : propose_local(ctx);
}

PlannerProposal MockPlanner::propose_global(const PlannerContext& ctx) const {
  const World& w = ctx.world;
  PlannerProposal p;
  p.drone = ctx.drone;
  p.tier = Tier::kGlobal;
  p.proposed = Action::global_idle();

  std::optional<Sector> best_safe;
  double best_safe_ratio = 0.0;
  std::optional<Sector> best_any;
  double best_any_ratio = 0.0;
  for (Sector s : kAllSectors) {
    const int pending = w.pending_in(s);
    if (pending == 0) continue;
    const int assigned = w.drones_assigned_to(s);
    if (assigned + 1 > w.ideal_sector_share(s) + options_.sector_tolerance) continue;
    const double ratio = static_cast<double>(pending) / static_cast<double>(assigned + 1);
    if (!best_any || ratio > best_any_ratio) {
      best_any = s;
      best_any_ratio = ratio;
    }
    const SectorClaim claim = w.claim_for(ctx.drone, s);
    if (claim.customers.empty() || !claim.within_budget) continue;
    if (!best_safe || ratio > best_safe_ratio) {
      best_safe = s;
      best_safe_ratio = ratio;
    }
  }
  if (best_safe) {
    p.proposed = Action::go_to_sector(*best_safe);
  } else if (best_any) {
    p.battery_unconstrained = Action::go_to_sector(*best_any);
  }
  return p;
}

PlannerProposal MockPlanner::propose_local(const PlannerContext& ctx) const {
  const World& w = ctx.world;
  const DroneState& d = w.drone(ctx.drone);
  PlannerProposal p;
  p.drone = ctx.drone;
  p.tier = Tier::kLocal;

  // Keep heading for last step's target unless the safety layer rejected it.
  for (auto it = ctx.memory.rbegin(); it != ctx.memory.rend(); ++it) {
    if (it->drone != ctx.drone) continue;
    if (it->t == w.state().t - 1 && !it->override_flag && it->proposed.kind == ActionKind::kMoveToCustomer) {
      const Customer* c = w.find_customer(it->proposed.customer);
      if (c != nullptr && !(d.position == c->position)) {
        p.proposed = it->proposed;
        return p;
      }
    }
    break;
  }

  const Route route = w.optimal_route(ctx.drone);
  if (route.stops.empty()) {
    p.proposed = Action::return_to_base();
    return p;
  }
  const Customer& next = *w.find_customer(route.stops.front());
  const double need = w.energy_between(d.position, next.position) + w.energy_to_base(next.position);
  const double budget =
      (d.soc.fraction() - w.config().battery.reserve_fraction) * w.config().battery.capacity_kwh;
  const Action move = Action::move_to_customer(next.id);
  if (need <= budget) {
    p.proposed = move;
  } else {
    p.proposed = Action::return_to_base();
    p.battery_unconstrained = move;
  }
  return p;
}

std::optional<FaultClass> draw_fault(const FaultConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double edge = config.duplicate_visit;
  if (u < edge) return FaultClass::kDuplicateVisit;
  edge += config.battery_ignore;
  if (u < edge) return FaultClass::kBatteryIgnore;
  edge += config.inefficient_route;
  if (u < edge) return FaultClass::kInefficientRoute;
  edge += config.sector_imbalance;
  if (u < edge) return FaultClass::kSectorImbalance;
  return std::nullopt;
}

PlannerProposal inject_fault(PlannerProposal proposal, const PlannerContext& ctx,
                             const FaultConfig& config, Rng& rng) {
  const std::optional<FaultClass> fault = draw_fault(config, rng);
  if (!fault) return proposal;
  const World& w = ctx.world;
  const Action before = proposal.proposed;

  switch (*fault) {
    case FaultClass::kDuplicateVisit: {
      if (proposal.tier != Tier::kLocal) break;
      std::vector<CustomerId> served;
      for (const Customer& c : w.state().customers) {
        if (c.status == CustomerStatus::kServed) served.push_back(c.id);
      }
      if (served.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, served.size() - 1);
      proposal.proposed = Action::move_to_customer(served[pick(rng)]);
      break;
    }
    case FaultClass::kBatteryIgnore:
      if (proposal.battery_unconstrained) proposal.proposed = *proposal.battery_unconstrained;
      break;
    case FaultClass::kInefficientRoute: {
      if (proposal.tier != Tier::kLocal || proposal.proposed.kind != ActionKind::kMoveToCustomer) break;
      const Route route = w.optimal_route(ctx.drone);
      if (route.stops.size() >= 2 && route.stops[0] == proposal.proposed.customer) {
        proposal.proposed = Action::move_to_customer(route.stops[1]);
      }
      break;
    }
    case FaultClass::kSectorImbalance: {
      if (proposal.tier != Tier::kGlobal) break;
      Sector crowded = Sector::kEast;
      for (Sector s : kAllSectors) {
        if (w.drones_assigned_to(s) > w.drones_assigned_to(crowded)) crowded = s;
      }
      proposal.proposed = Action::go_to_sector(crowded);
      break;
    }
  }
  if (!(proposal.proposed == before)) proposal.injected_fault = fault;
  return proposal;
}

FaultInjectingPlanner::FaultInjectingPlanner(std::unique_ptr<Planner> inner, FaultConfig config,
                                             int drone_count)
    : inner_(std::move(inner)), config_(config), streams_(static_cast<std::size_t>(drone_count)) {
  config_.validate();
  reset(0);
}

void FaultInjectingPlanner::reset(std::uint64_t episode_seed) {
  inner_->reset(episode_seed);
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(episode_seed), static_cast<std::uint32_t>(episode_seed >> 32),
                      static_cast<std::uint32_t>(i), 0xfa17U};
    streams_[i].seed(seq);
  }
}

PlannerProposal FaultInjectingPlanner::propose(const PlannerContext& ctx) {
  PlannerProposal p = inner_->propose(ctx);
  if (ctx.drone < 0 || static_cast<std::size_t>(ctx.drone) >= streams_.size()) {
    throw std::out_of_range("fault injector has no stream for this drone");
  }
  return inject_fault(std::move(p), ctx, config_, streams_[static_cast<std::size_t>(ctx.drone)]);
}

}  // namespace dronesafe
