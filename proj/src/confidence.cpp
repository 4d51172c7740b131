// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/confidence.hpp"

#include <algorithm>

namespace hotswap::confidence {

using core::LifecycleState;
using core::Replica;
using core::Topology;

std::string to_string(SwapReason r) {
  return r == SwapReason::Fault ? "FAULT" : "EFFICIENCY";
}

int update_hysteresis(int streak, bool margin_met) {
  return margin_met ? streak + 1 : 0;
}

bool promotable(const Topology& t, const Replica& r) {
  if (r.state != LifecycleState::Standby || !r.certified) return false;
  const core::VmPlatform* vm = t.find_vm(r.host);
  if (vm && vm->blacklisted) return false;
  const core::HardwarePlatform* hw = t.hardware_of(r);
  if (hw && hw->blacklisted) return false;
  return true;
}

Assignment mediate_supply_demand(const Topology& topology,
                                 const std::vector<std::string>& certified,
                                 const DemandTable& demand) {
  struct Candidate {
    double efficiency;
    std::string replica;
    std::string function;
  };
  std::vector<Candidate> candidates;
  for (const auto& id : certified) {
    const Replica* r = topology.find_replica(id);
    if (!r) continue;
    if (r->state != LifecycleState::Active && r->state != LifecycleState::Standby)
      continue;
    if (r->efficiency_score < demand.floor_for(r->function)) continue;
    candidates.push_back({r->efficiency_score, r->id, r->function});
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.efficiency != b.efficiency) return a.efficiency > b.efficiency;
    return a.replica < b.replica;
  });

  Assignment out;
  std::map<std::string, bool> used;
  for (const auto& c : candidates) {
    if (out.by_function.count(c.function) || used[c.replica]) continue;
    out.by_function[c.function] = c.replica;
    used[c.replica] = true;
  }
  for (const auto& f : topology.functions)
    if (!out.by_function.count(f.id)) out.uncovered.push_back(f.id);
  return out;
}

namespace {

// Best promotion candidate for a function: highest efficiency estimate above
// the demand floor, ties to the smallest id.
const Replica* best_standby(const DecisionInputs& in, const Topology& t,
                            const DemandTable& demand, const std::string& function,
                            const std::string& exclude) {
  const Replica* best = nullptr;
  double best_eff = -1.0;
  for (const auto& r : t.replicas) {
    if (r.function != function || r.id == exclude) continue;
    if (!promotable(t, r)) continue;
    auto it = in.efficiency.find(r.id);
    const double eff = it == in.efficiency.end() ? r.efficiency_score : it->second;
    if (eff < demand.floor_for(function)) continue;
    if (!best || eff > best_eff || (eff == best_eff && r.id < best->id)) {
      best = &r;
      best_eff = eff;
    }
  }
  return best;
}

}  // namespace

DecisionOutcome decide(const DecisionInputs& in, const Topology& topology,
                       const DemandTable& demand, const HysteresisPolicy& policy,
                       std::map<std::string, int>& streaks) {
  DecisionOutcome out;

  for (const auto& f : topology.functions) {
    if (auto it = in.pending_promotion.find(f.id);
        it != in.pending_promotion.end() && it->second)
      continue;  // a promotion is already in flight

    std::optional<std::string> active = core::active_replica(topology, f.id);

    if (!active) {
      // also treat a SUSPECT-but-not-yet-swapped replica as the incumbent
      // only for fault handling below; coverage recovery promotes fresh.
      const Replica* suspect = nullptr;
      for (const auto& r : topology.replicas)
        if (r.function == f.id && r.state == LifecycleState::Suspect &&
            (!suspect || r.id < suspect->id))
          suspect = &r;
      const Replica* target = best_standby(in, topology, demand, f.id,
                                           suspect ? suspect->id : "");
      if (suspect) {
        auto hit = in.health.find(suspect->id);
        const bool faulty =
            hit != in.health.end() && hit->second == integrity::Health::Faulty;
        if (faulty) {
          if (target) {
            out.commands.push_back({in.now, f.id, suspect->id, target->id,
                                    SwapReason::Fault, in.swap_latency});
          } else {
            out.degraded_functions.push_back(f.id);
          }
          streaks[f.id] = 0;
          continue;
        }
      }
      if (target) {
        out.commands.push_back({in.now, f.id, "", target->id,
                                SwapReason::Fault, in.swap_latency});
      } else {
        out.degraded_functions.push_back(f.id);
      }
      streaks[f.id] = 0;
      continue;
    }

    const Replica* act = topology.find_replica(*active);
    auto hit = in.health.find(*active);
    const bool active_faulty =
        hit != in.health.end() && hit->second == integrity::Health::Faulty;
    const core::HardwarePlatform* hw = act ? topology.hardware_of(*act) : nullptr;
    const core::VmPlatform* vm = act ? topology.find_vm(act->host) : nullptr;
    const bool host_blacklisted =
        (hw && hw->blacklisted) || (vm && vm->blacklisted);

    if (active_faulty || host_blacklisted) {
      const Replica* target = best_standby(in, topology, demand, f.id, *active);
      if (target) {
        out.commands.push_back({in.now, f.id, *active, target->id,
                                SwapReason::Fault, in.swap_latency});
      } else {
        out.degraded_functions.push_back(f.id);
      }
      streaks[f.id] = 0;
      continue;
    }

    // efficiency arbitration, hysteresis-gated
    const Replica* target = best_standby(in, topology, demand, f.id, *active);
    bool margin_met = false;
    if (target) {
      auto ait = in.efficiency.find(*active);
      auto sit = in.efficiency.find(target->id);
      const double active_eff =
          ait == in.efficiency.end() ? act->efficiency_score : ait->second;
      const double standby_eff =
          sit == in.efficiency.end() ? target->efficiency_score : sit->second;
      margin_met = (standby_eff - active_eff) >= policy.margin;
    }
    streaks[f.id] = update_hysteresis(streaks[f.id], margin_met);
    if (margin_met && streaks[f.id] >= policy.rounds) {
      out.commands.push_back({in.now, f.id, *active, target->id,
                              SwapReason::Efficiency, in.swap_latency});
      streaks[f.id] = 0;
    }
  }
  return out;
}

}  // namespace hotswap::confidence
