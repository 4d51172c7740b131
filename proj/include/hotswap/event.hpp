// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotswap/core.hpp"

namespace hotswap::sim {

// Engine phases at equal tick; events carry the phase of the emitting stage.
enum class Phase : int {
  FaultApplication = 0,
  Sampling = 1,
  Integrity = 2,
  Confidence = 3,
  SwapExecution = 4,
  Lifecycle = 5,
};

struct SimEvent {
  Tick tick = 0;
  int priority = 0;            // Phase of the emitting stage
  std::uint64_t sequence = 0;  // globally monotone
  std::string kind;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static SimEvent from_json(const nlohmann::json& j);
};

// Event kind names as they appear in events.jsonl.
namespace event_kind {
inline constexpr const char* FaultOnset = "fault_onset";
inline constexpr const char* FaultCleared = "fault_cleared";
inline constexpr const char* ProbeDetached = "probe_detached";
inline constexpr const char* ProbeDistrusted = "probe_distrusted";
inline constexpr const char* Assessment = "assessment";
inline constexpr const char* AnomalyPersistent = "anomaly_persistent";
inline constexpr const char* SwapCommandIssued = "swap_command";
inline constexpr const char* SwapCompleted = "swap_completed";
inline constexpr const char* StaleCommand = "stale_command";
inline constexpr const char* DegradedMode = "degraded_mode";
inline constexpr const char* LifecycleTransition = "lifecycle_transition";
inline constexpr const char* HealScheduled = "heal_scheduled";
inline constexpr const char* TestResolved = "test_resolved";
inline constexpr const char* DeadlineMiss = "deadline_miss";
inline constexpr const char* HardwareBlacklisted = "hardware_blacklisted";
inline constexpr const char* ProtocolViolation = "protocol_violation";
}  // namespace event_kind

// One event per line, canonical key ordering, shortest round-trip numbers.
std::string serialize_event_log(const std::vector<SimEvent>& log);
std::vector<SimEvent> parse_event_log(const std::string& jsonl);

}  // namespace hotswap::sim
