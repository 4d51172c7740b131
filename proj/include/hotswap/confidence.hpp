// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "hotswap/core.hpp"
#include "hotswap/integrity.hpp"

namespace hotswap::confidence {

enum class SwapReason { Fault, Efficiency };
std::string to_string(SwapReason r);

struct SwapCommand {
  Tick tick = 0;
  std::string function;
  std::string demote;   // empty for a pure coverage-recovery promotion
  std::string promote;
  SwapReason reason = SwapReason::Fault;
  Tick expected_latency = 0;
};

struct DemandTable {
  // required active count per function is always 1; only the floor varies
  std::map<std::string, double> efficiency_floor;

  double floor_for(const std::string& function) const {
    auto it = efficiency_floor.find(function);
    return it == efficiency_floor.end() ? 0.0 : it->second;
  }
};

struct HysteresisPolicy {
  double margin = 0.1;  // delta: standby must beat active by this much
  int rounds = 3;       // p: consecutive decision rounds before acting
};

// Streak increments while the margin holds, resets otherwise.
// An efficiency swap is permitted only once streak >= policy.rounds.
int update_hysteresis(int streak, bool margin_met);

struct Assignment {
  std::map<std::string, std::string> by_function;
  std::vector<std::string> uncovered;
};

// Greedy supply/demand mediation: assign certified ACTIVE/STANDBY replicas to
// functions maximizing summed efficiency, one replica per function, ties to
// the lexicographically smallest replica id. Uses current efficiency scores.
Assignment mediate_supply_demand(const core::Topology& topology,
                                 const std::vector<std::string>& certified,
                                 const DemandTable& demand);

struct DecisionOutcome {
  std::vector<SwapCommand> commands;
  std::vector<std::string> degraded_functions;  // no certified standby available
};

struct DecisionInputs {
  Tick now = 0;
  Tick swap_latency = 0;
  // latest per-replica health (UNKNOWN treated as no information, never fault)
  std::map<std::string, integrity::Health> health;
  // latest known efficiency estimate per replica
  std::map<std::string, double> efficiency;
  // functions with an in-flight promotion; no new command is issued for them
  std::map<std::string, bool> pending_promotion;
};

// Per-function arbitration: fault swaps away from FAULTY (or blacklisted-host)
// actives, hysteresis-gated efficiency swaps toward better standbys, recovery
// promotion for uncovered functions. Pure aside from the streak table update.
DecisionOutcome decide(const DecisionInputs& in, const core::Topology& topology,
                       const DemandTable& demand, const HysteresisPolicy& policy,
                       std::map<std::string, int>& streaks);

// Eligibility of a replica as a promotion target: STANDBY, certified, and not
// hosted on a blacklisted platform.
bool promotable(const core::Topology& t, const core::Replica& r);

}  // namespace hotswap::confidence
