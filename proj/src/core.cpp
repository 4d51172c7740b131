// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/core.hpp"

#include <algorithm>
#include <set>

namespace hotswap {

std::string to_string(MetricName m) {
  switch (m) {
    case MetricName::LatencyMs: return "latency_ms";
    case MetricName::ErrorRate: return "error_rate";
    case MetricName::Throughput: return "throughput";
    case MetricName::CpuLoad: return "cpu_load";
    case MetricName::TemperatureProxy: return "temperature_proxy";
  }
  return "?";
}

std::optional<MetricName> metric_from_string(const std::string& s) {
  for (MetricName m : kAllMetrics)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

namespace core {

std::string to_string(LifecycleState s) {
  switch (s) {
    case LifecycleState::Active: return "ACTIVE";
    case LifecycleState::Standby: return "STANDBY";
    case LifecycleState::Suspect: return "SUSPECT";
    case LifecycleState::Blacklisted: return "BLACKLISTED";
    case LifecycleState::Healing: return "HEALING";
    case LifecycleState::Testing: return "TESTING";
    case LifecycleState::Retired: return "RETIRED";
  }
  return "?";
}

std::string to_string(LifecycleEvent e) {
  switch (e) {
    case LifecycleEvent::AnomalyFlagged: return "anomaly_flagged";
    case LifecycleEvent::BlacklistConfirmed: return "blacklist_confirmed";
    case LifecycleEvent::SwapOutEfficiency: return "swap_out_efficiency";
    case LifecycleEvent::HealStarted: return "heal_started";
    case LifecycleEvent::HealComplete: return "heal_complete";
    case LifecycleEvent::TestPassed: return "test_passed";
    case LifecycleEvent::TestFailed: return "test_failed";
    case LifecycleEvent::Promote: return "promote";
    case LifecycleEvent::Demote: return "demote";
  }
  return "?";
}

std::optional<LifecycleState> lifecycle_state_from_string(const std::string& s) {
  for (LifecycleState st : {LifecycleState::Active, LifecycleState::Standby,
                            LifecycleState::Suspect, LifecycleState::Blacklisted,
                            LifecycleState::Healing, LifecycleState::Testing,
                            LifecycleState::Retired})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

LifecycleState transition(LifecycleState state, LifecycleEvent event,
                          int heal_attempts, int max_heal_attempts) {
  using S = LifecycleState;
  using E = LifecycleEvent;
  switch (state) {
    case S::Active:
      switch (event) {
        case E::AnomalyFlagged: return S::Suspect;
        case E::SwapOutEfficiency: return S::Standby;
        case E::Demote: return S::Standby;
        case E::BlacklistConfirmed: return S::Blacklisted;
        default: break;
      }
      break;
    case S::Standby:
      switch (event) {
        case E::Promote: return S::Active;
        case E::AnomalyFlagged: return S::Suspect;
        case E::BlacklistConfirmed: return S::Blacklisted;
        default: break;
      }
      break;
    case S::Suspect:
      switch (event) {
        case E::AnomalyFlagged: return S::Suspect;
        case E::BlacklistConfirmed: return S::Blacklisted;
        case E::Demote: return S::Standby;
        case E::Promote: return S::Active;  // suspicion cleared, re-promoted
        default: break;
      }
      break;
    case S::Blacklisted:
      if (event == E::HealStarted) {
        return heal_attempts >= max_heal_attempts ? S::Retired : S::Healing;
      }
      break;
    case S::Healing:
      if (event == E::HealComplete) return S::Testing;
      break;
    case S::Testing:
      if (event == E::TestPassed) return S::Standby;
      if (event == E::TestFailed) {
        return heal_attempts >= max_heal_attempts ? S::Retired : S::Blacklisted;
      }
      break;
    case S::Retired:
      break;  // absorbing
  }
  throw IllegalTransition(state, event);
}

std::vector<LifecycleEvent> admissible_events(LifecycleState state) {
  using S = LifecycleState;
  using E = LifecycleEvent;
  switch (state) {
    case S::Active:
      return {E::AnomalyFlagged, E::SwapOutEfficiency, E::Demote, E::BlacklistConfirmed};
    case S::Standby:
      return {E::Promote, E::AnomalyFlagged, E::BlacklistConfirmed};
    case S::Suspect:
      return {E::AnomalyFlagged, E::BlacklistConfirmed, E::Demote, E::Promote};
    case S::Blacklisted:
      return {E::HealStarted};
    case S::Healing:
      return {E::HealComplete};
    case S::Testing:
      return {E::TestPassed, E::TestFailed};
    case S::Retired:
      return {};
  }
  return {};
}

const Replica* Topology::find_replica(const std::string& id) const {
  for (const auto& r : replicas)
    if (r.id == id) return &r;
  return nullptr;
}
Replica* Topology::find_replica(const std::string& id) {
  for (auto& r : replicas)
    if (r.id == id) return &r;
  return nullptr;
}
const VmPlatform* Topology::find_vm(const std::string& id) const {
  for (const auto& v : vm_platforms)
    if (v.id == id) return &v;
  return nullptr;
}
const HardwarePlatform* Topology::find_hardware(const std::string& id) const {
  for (const auto& h : hardware_platforms)
    if (h.id == id) return &h;
  return nullptr;
}
const FunctionRole* Topology::find_function(const std::string& id) const {
  for (const auto& f : functions)
    if (f.id == id) return &f;
  return nullptr;
}
const HardwarePlatform* Topology::hardware_of(const Replica& r) const {
  const VmPlatform* vm = find_vm(r.host);
  return vm ? find_hardware(vm->hardware) : nullptr;
}

namespace {

template <typename Entities>
void check_unique(const Entities& es, const char* klass,
                  std::vector<Violation>& out, std::set<std::string>& all_ids) {
  std::set<std::string> seen;
  for (const auto& e : es) {
    if (!seen.insert(e.id).second)
      out.push_back({"DuplicateId", e.id,
                     std::string(klass) + " id is not unique: " + e.id});
    if (!all_ids.insert(e.id).second)
      out.push_back({"AmbiguousId", e.id,
                     "id reused across entity classes: " + e.id});
  }
}

}  // namespace

std::vector<Violation> validate_topology(const Topology& t) {
  std::vector<Violation> out;
  std::set<std::string> all_ids;
  check_unique(t.hardware_platforms, "hardware platform", out, all_ids);
  check_unique(t.vm_platforms, "vm platform", out, all_ids);
  check_unique(t.functions, "function", out, all_ids);
  check_unique(t.replicas, "replica", out, all_ids);

  for (const auto& f : t.functions) {
    if (f.deadline_ticks < 1)
      out.push_back({"InvalidDeadline", f.id, "deadline_ticks must be >= 1"});
  }
  for (const auto& v : t.vm_platforms) {
    if (!t.find_hardware(v.hardware))
      out.push_back({"DanglingHost", v.id,
                     "vm platform bound to nonexistent hardware " + v.hardware});
  }
  std::map<std::string, int> peers;
  for (const auto& r : t.replicas) {
    if (!t.find_vm(r.host))
      out.push_back({"DanglingHost", r.id,
                     "replica bound to nonexistent vm platform " + r.host});
    if (!t.find_function(r.function))
      out.push_back({"DanglingFunction", r.id,
                     "replica bound to nonexistent function " + r.function});
    else
      peers[r.function]++;
    if (r.efficiency_score < 0.0 || r.efficiency_score > 1.0)
      out.push_back({"InvalidEfficiency", r.id, "efficiency_score outside [0,1]"});
  }
  for (const auto& f : t.functions) {
    if (peers[f.id] < 2)
      out.push_back({"NoPeer", f.id,
                     "function has fewer than 2 replicas; the protocol needs peers"});
  }
  // blacklisted platforms must not host ACTIVE replicas
  for (const auto& r : t.replicas) {
    if (r.state != LifecycleState::Active) continue;
    const VmPlatform* vm = t.find_vm(r.host);
    if (vm && vm->blacklisted)
      out.push_back({"ActiveOnBlacklisted", r.id,
                     "ACTIVE replica hosted on blacklisted vm platform " + vm->id});
    const HardwarePlatform* hw = t.hardware_of(r);
    if (hw && hw->blacklisted)
      out.push_back({"ActiveOnBlacklisted", r.id,
                     "ACTIVE replica hosted on blacklisted hardware " + hw->id});
  }
  return out;
}

std::optional<std::string> active_replica(const Topology& t, const std::string& function_id) {
  std::optional<std::string> found;
  for (const auto& r : t.replicas) {
    if (r.function != function_id || r.state != LifecycleState::Active) continue;
    if (found) throw MultipleActive(function_id);
    found = r.id;
  }
  return found;
}

}  // namespace core
}  // namespace hotswap
