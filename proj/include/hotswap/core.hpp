// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hotswap {

using Tick = std::int64_t;

enum class MetricName { LatencyMs, ErrorRate, Throughput, CpuLoad, TemperatureProxy };

inline constexpr MetricName kAllMetrics[] = {
    MetricName::LatencyMs, MetricName::ErrorRate, MetricName::Throughput,
    MetricName::CpuLoad, MetricName::TemperatureProxy};

std::string to_string(MetricName m);
std::optional<MetricName> metric_from_string(const std::string& s);

// Ordered map keeps every serialization and iteration deterministic.
using MetricMap = std::map<MetricName, double>;

namespace core {

enum class LifecycleState {
  Active, Standby, Suspect, Blacklisted, Healing, Testing, Retired
};

enum class LifecycleEvent {
  AnomalyFlagged, BlacklistConfirmed, SwapOutEfficiency,
  HealStarted, HealComplete, TestPassed, TestFailed, Promote, Demote
};

std::string to_string(LifecycleState s);
std::string to_string(LifecycleEvent e);
std::optional<LifecycleState> lifecycle_state_from_string(const std::string& s);

// Signals a protocol bug in the caller; the simulation tick must abort.
struct IllegalTransition : std::runtime_error {
  IllegalTransition(LifecycleState s, LifecycleEvent e)
      : std::runtime_error("illegal lifecycle transition: " + to_string(s) +
                           " + " + to_string(e)),
        state(s), event(e) {}
  LifecycleState state;
  LifecycleEvent event;
};

// Protocol safety violation: two ACTIVE replicas for one function.
struct MultipleActive : std::runtime_error {
  explicit MultipleActive(const std::string& function)
      : std::runtime_error("multiple ACTIVE replicas for function " + function),
        function(function) {}
  std::string function;
};

// The replica lifecycle state machine. Every (state, event) pair has exactly
// one successor or throws IllegalTransition. RETIRED is absorbing: no event
// is legal there. Heal exhaustion is resolved here: a failed test (or a heal
// request) with heal_attempts >= max_heal_attempts retires the replica.
LifecycleState transition(LifecycleState state, LifecycleEvent event,
                          int heal_attempts, int max_heal_attempts);

// All events legal in `state` given the attempt budget. Drives the fuzz tests
// and the engine's own sanity checks.
std::vector<LifecycleEvent> admissible_events(LifecycleState state);

struct FunctionRole {
  std::string id;
  std::string name;          // navigation, targeting, resource-economy, or user-defined
  Tick deadline_ticks = 1;   // max tolerable per-task latency
};

struct HardwarePlatform {
  std::string id;
  bool blacklisted = false;
  MetricMap nominal;
};

struct VmPlatform {
  std::string id;
  std::string hardware;      // hosting HardwarePlatform id
  bool blacklisted = false;
  MetricMap nominal;
};

struct Replica {
  std::string id;
  std::string function;      // FunctionRole id
  std::string host;          // VmPlatform id
  LifecycleState state = LifecycleState::Standby;
  double efficiency_score = 1.0;  // in [0,1]
  int heal_attempts = 0;
  bool certified = true;     // false between blacklist_confirmed and test_passed
  MetricMap nominal;         // fault-free ground-truth metrics
};

struct Topology {
  std::vector<HardwarePlatform> hardware_platforms;
  std::vector<VmPlatform> vm_platforms;
  std::vector<FunctionRole> functions;
  std::vector<Replica> replicas;

  const Replica* find_replica(const std::string& id) const;
  Replica* find_replica(const std::string& id);
  const VmPlatform* find_vm(const std::string& id) const;
  const HardwarePlatform* find_hardware(const std::string& id) const;
  const FunctionRole* find_function(const std::string& id) const;
  // Hardware platform ultimately hosting a replica, or nullptr on a dangling chain.
  const HardwarePlatform* hardware_of(const Replica& r) const;
};

struct Violation {
  std::string rule;     // e.g. DanglingHost, NoPeer, DuplicateId
  std::string entity;   // offending id
  std::string message;
};

// Empty list iff all topology invariants hold. Violations are data, not failures.
std::vector<Violation> validate_topology(const Topology& t);

// The unique ACTIVE replica for a function, or nullopt during a swap gap.
// Throws MultipleActive on corrupted state.
std::optional<std::string> active_replica(const Topology& t, const std::string& function_id);

}  // namespace core
}  // namespace hotswap
