// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hotswap/confidence.hpp"
#include "hotswap/core.hpp"

namespace hotswap::swapexec {

struct SwapConfig {
  Tick latency_ticks = 5;
  bool warm_handover = true;  // efficiency swaps hand over with zero gap
};

struct HealConfig {
  Tick reboot_ticks = 200;
  Tick reconfigure_ticks = 50;
  Tick test_ticks = 50;
  int max_heal_attempts = 3;
};

struct SwapExecution {
  confidence::SwapCommand command;
  Tick start = 0;
  Tick handover_complete = 0;
  Tick gap_ticks = 0;  // window with no ACTIVE replica for the function
};

struct HealingJob {
  std::string replica;
  Tick reboot_until = 0;
  Tick reconfigure_until = 0;
  Tick test_until = 0;
  int attempt = 0;  // 1-based attempt number
};

enum class TestOutcome { Pass, Fail };
std::string to_string(TestOutcome o);

// A lifecycle step the executor performed, for the event log.
struct LifecycleChange {
  std::string replica;
  core::LifecycleEvent event;
  core::LifecycleState from;
  core::LifecycleState to;
};

struct SwapResult {
  bool stale = false;           // promote target no longer eligible
  std::string stale_reason;
  std::optional<SwapExecution> execution;
  std::vector<LifecycleChange> changes;
  // promotion still owed at execution.handover_complete (fault swaps)
  std::optional<std::string> deferred_promote;
};

// Execute a swap command against live topology state. Efficiency swaps with a
// warm standby hand over atomically (gap 0); fault swaps blacklist the demoted
// replica immediately and activate the promote target latency ticks later.
// Eligibility is revalidated here: state may have changed since the decision.
SwapResult execute_swap(const confidence::SwapCommand& command, Tick now,
                        const SwapConfig& config, core::Topology& topology);

// Build the reboot -> reconfigure -> test schedule for a blacklisted replica
// and charge one heal attempt. The caller records the HEAL_STARTED transition;
// attempt exhaustion is resolved by the caller via the RETIRED transition.
HealingJob schedule_heal(const std::string& replica, Tick now,
                         const HealConfig& config, core::Topology& topology);

// PASS iff no unhealable (permanent-class) fault persists on the replica.
// Healable faults were cleared during reconfiguration; the autonomous test is
// modeled as perfect.
TestOutcome resolve_test(const HealingJob& job, bool permanent_fault_present);

}  // namespace hotswap::swapexec
