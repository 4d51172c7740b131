// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/swapexec.hpp"

namespace hotswap::swapexec {

using core::LifecycleEvent;
using core::LifecycleState;
using core::Replica;
using core::Topology;

std::string to_string(TestOutcome o) {
  return o == TestOutcome::Pass ? "PASS" : "FAIL";
}

namespace {

LifecycleChange apply(Replica& r, LifecycleEvent e, int max_heal_attempts) {
  LifecycleChange c{r.id, e, r.state,
                    core::transition(r.state, e, r.heal_attempts, max_heal_attempts)};
  r.state = c.to;
  if (e == LifecycleEvent::BlacklistConfirmed) r.certified = false;
  if (e == LifecycleEvent::TestPassed) r.certified = true;
  return c;
}

}  // namespace

SwapResult execute_swap(const confidence::SwapCommand& command, Tick now,
                        const SwapConfig& config, Topology& topology) {
  SwapResult result;

  Replica* promote = topology.find_replica(command.promote);
  if (!promote || !confidence::promotable(topology, *promote)) {
    result.stale = true;
    result.stale_reason = "promote target " + command.promote + " no longer eligible";
    return result;
  }
  Replica* demote = nullptr;
  if (!command.demote.empty()) {
    demote = topology.find_replica(command.demote);
    if (!demote || (demote->state != LifecycleState::Active &&
                    demote->state != LifecycleState::Suspect)) {
      result.stale = true;
      result.stale_reason = "demote target " + command.demote + " no longer incumbent";
      return result;
    }
  }

  SwapExecution exec;
  exec.command = command;
  exec.start = now;
  exec.handover_complete = now + config.latency_ticks;

  // max_heal_attempts is irrelevant to the events used here; pass a bound
  // that keeps transition() total.
  constexpr int kNoRetire = 1 << 20;

  if (command.reason == confidence::SwapReason::Efficiency && config.warm_handover) {
    // warm standby: demote and promote in the same tick, no gap
    if (demote)
      result.changes.push_back(apply(*demote, LifecycleEvent::SwapOutEfficiency, kNoRetire));
    result.changes.push_back(apply(*promote, LifecycleEvent::Promote, kNoRetire));
    exec.gap_ticks = 0;
  } else if (command.reason == confidence::SwapReason::Efficiency) {
    if (demote)
      result.changes.push_back(apply(*demote, LifecycleEvent::SwapOutEfficiency, kNoRetire));
    exec.gap_ticks = config.latency_ticks;
    result.deferred_promote = promote->id;
  } else {
    // fault swap: the incumbent is confirmed faulty and blacklisted now;
    // the standby needs the full handover latency to come online
    if (demote)
      result.changes.push_back(apply(*demote, LifecycleEvent::BlacklistConfirmed, kNoRetire));
    exec.gap_ticks = config.latency_ticks;
    result.deferred_promote = promote->id;
  }

  result.execution = exec;
  return result;
}

HealingJob schedule_heal(const std::string& replica, Tick now,
                         const HealConfig& config, Topology& topology) {
  Replica* r = topology.find_replica(replica);
  if (!r || r->state != LifecycleState::Blacklisted)
    throw std::logic_error("schedule_heal: replica not blacklisted: " + replica);
  if (r->heal_attempts >= config.max_heal_attempts)
    throw std::logic_error("schedule_heal: attempts exhausted for " + replica);

  HealingJob job;
  job.replica = replica;
  job.reboot_until = now + config.reboot_ticks;
  job.reconfigure_until = job.reboot_until + config.reconfigure_ticks;
  job.test_until = job.reconfigure_until + config.test_ticks;
  r->heal_attempts += 1;
  job.attempt = r->heal_attempts;
  return job;
}

TestOutcome resolve_test(const HealingJob&, bool permanent_fault_present) {
  return permanent_fault_present ? TestOutcome::Fail : TestOutcome::Pass;
}

}  // namespace hotswap::swapexec
