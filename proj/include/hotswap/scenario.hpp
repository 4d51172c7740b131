// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotswap/confidence.hpp"
#include "hotswap/core.hpp"
#include "hotswap/integrity.hpp"
#include "hotswap/probes.hpp"
#include "hotswap/swapexec.hpp"

namespace hotswap::sim {

enum class FaultClass {
  LatencyDrift, ErrorBurst, ThroughputDroop,
  GremlinBurst, PermanentCrash, DeadlineCreep
};

std::string to_string(FaultClass c);
std::optional<FaultClass> fault_class_from_string(const std::string& s);
bool fault_healable(FaultClass c);  // PERMANENT_CRASH is never healable

struct FaultSpec {
  std::string target;                 // primary target component
  std::vector<std::string> targets;   // GREMLIN_BURST: >= 2 colocated targets
  FaultClass klass = FaultClass::ErrorBurst;
  Tick onset = 0;
  double magnitude = 0.0;
  std::optional<Tick> duration;       // nullopt = permanent

  bool healable() const { return fault_healable(klass); }
  bool active_at(Tick t) const {
    return t >= onset && (!duration || t < onset + *duration);
  }
  std::vector<std::string> all_targets() const {
    return targets.empty() ? std::vector<std::string>{target} : targets;
  }
};

// Apply one fault's effect to a component's ground truth for this tick.
// deadline_ticks is the owning function's deadline (DEADLINE_CREEP only).
void inject(const FaultSpec& fault, probes::ComponentTruth& truth, Tick tick,
            Tick deadline_ticks);

using DetectorConfig = integrity::DetectorConfig;

struct HardwareBlacklistConfig {
  int replica_threshold = 2;  // distinct blacklisted replicas to condemn a platform
  Tick window_ticks = 500;
};

struct Scenario {
  std::string name;
  Tick ticks = 1;
  std::uint64_t seed = 0;
  core::Topology topology;
  std::vector<probes::Probe> probes;
  DetectorConfig detector;
  confidence::HysteresisPolicy policy;
  confidence::DemandTable demand;
  swapexec::SwapConfig swap;
  swapexec::HealConfig heal;
  HardwareBlacklistConfig hardware_blacklist;
  double glass_substitution_fraction = 0.5;
  std::vector<FaultSpec> faults;
};

struct ParseIssue {
  std::string path;
  std::string message;
};

struct ParseError : std::runtime_error {
  explicit ParseError(std::vector<ParseIssue> issues);
  std::vector<ParseIssue> issues;
};

// Strict parse: unknown keys rejected, every reference resolved, all
// invariants checked. Throws ParseError listing every problem found.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace hotswap::sim
