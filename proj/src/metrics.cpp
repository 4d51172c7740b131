// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace hotswap::sim {

using nlohmann::json;

json MetricsReport::to_json() const {
  json avail = json::object();
  for (const auto& [f, a] : availability) avail[f] = a;
  json j{{"availability", avail},
         {"swap_count", {{"fault", fault_swap_count}, {"efficiency", efficiency_swap_count}}},
         {"detected_fault_count", detected_fault_count},
         {"false_swap_count", false_swap_count},
         {"deadline_miss_count", deadline_miss_count},
         {"degraded_mode_ticks", degraded_mode_ticks},
         {"finding_count", finding_count}};
  if (mean_detection_latency) j["mean_detection_latency"] = *mean_detection_latency;
  else j["mean_detection_latency"] = nullptr;
  return j;
}

MetricsReport compute_metrics(const std::vector<SimEvent>& log, const Scenario& scenario) {
  MetricsReport rep;

  struct ReplicaTimeline {
    core::LifecycleState state;
    bool certified = true;
    std::string function;
  };
  std::map<std::string, ReplicaTimeline> replicas;
  for (const auto& r : scenario.topology.replicas)
    replicas[r.id] = {r.state, true, r.function};

  // detection latency bookkeeping: first persistent flag per fault spec
  std::vector<std::optional<Tick>> first_flag(scenario.faults.size());

  const Tick slack =
      scenario.detector.window_ticks * (scenario.detector.persistence_windows + 1);

  std::map<std::string, std::int64_t> covered_ticks;
  for (const auto& f : scenario.topology.functions) covered_ticks[f.id] = 0;

  size_t cursor = 0;
  for (Tick t = 0; t < scenario.ticks; ++t) {
    for (; cursor < log.size() && log[cursor].tick == t; ++cursor) {
      const SimEvent& e = log[cursor];
      if (e.kind == event_kind::LifecycleTransition) {
        const std::string id = e.payload.at("replica").get<std::string>();
        const std::string ev = e.payload.at("event").get<std::string>();
        auto it = replicas.find(id);
        if (it == replicas.end()) continue;
        auto to = core::lifecycle_state_from_string(e.payload.at("to").get<std::string>());
        if (to) it->second.state = *to;
        if (ev == "blacklist_confirmed") it->second.certified = false;
        if (ev == "test_passed") it->second.certified = true;
      } else if (e.kind == event_kind::SwapCompleted) {
        const std::string reason = e.payload.at("reason").get<std::string>();
        if (reason == "FAULT") {
          rep.fault_swap_count++;
          const std::string demoted = e.payload.value("demote", std::string());
          if (!demoted.empty()) {
            const Tick swap_tick = e.payload.at("command_tick").get<Tick>();
            auto rit = replicas.find(demoted);
            std::string vm_id, hw_id;
            if (const core::Replica* r = scenario.topology.find_replica(demoted)) {
              vm_id = r->host;
              if (const core::HardwarePlatform* hw = scenario.topology.hardware_of(*r))
                hw_id = hw->id;
            }
            (void)rit;
            bool overlapping = false;
            for (const auto& f : scenario.faults) {
              bool touches = false;
              for (const auto& tgt : f.all_targets())
                if (tgt == demoted || tgt == vm_id || tgt == hw_id) touches = true;
              if (!touches) continue;
              if (swap_tick < f.onset) continue;
              if (!f.duration || swap_tick <= f.onset + *f.duration + slack) {
                overlapping = true;
                break;
              }
            }
            if (!overlapping) rep.false_swap_count++;
          }
        } else {
          rep.efficiency_swap_count++;
        }
      } else if (e.kind == event_kind::AnomalyPersistent) {
        const std::string target = e.payload.at("target").get<std::string>();
        for (size_t i = 0; i < scenario.faults.size(); ++i) {
          if (first_flag[i]) continue;
          const auto& f = scenario.faults[i];
          if (e.tick < f.onset) continue;
          for (const auto& tgt : f.all_targets())
            if (tgt == target) { first_flag[i] = e.tick; break; }
        }
      } else if (e.kind == event_kind::DeadlineMiss) {
        rep.deadline_miss_count += e.payload.at("ticks").get<std::int64_t>();
      } else if (e.kind == event_kind::Assessment) {
        rep.finding_count +=
            static_cast<std::int64_t>(e.payload.at("findings").size());
      }
    }

    // end-of-tick coverage
    for (const auto& f : scenario.topology.functions) {
      bool covered = false;
      for (const auto& [id, tl] : replicas)
        if (tl.function == f.id && tl.state == core::LifecycleState::Active &&
            tl.certified) {
          covered = true;
          break;
        }
      if (covered) covered_ticks[f.id]++;
      else rep.degraded_mode_ticks++;
    }
  }

  for (const auto& f : scenario.topology.functions)
    rep.availability[f.id] =
        static_cast<double>(covered_ticks[f.id]) / static_cast<double>(scenario.ticks);

  double total_latency = 0.0;
  for (size_t i = 0; i < scenario.faults.size(); ++i) {
    if (!first_flag[i]) continue;
    rep.detected_fault_count++;
    total_latency += static_cast<double>(*first_flag[i] - scenario.faults[i].onset);
  }
  if (rep.detected_fault_count > 0)
    rep.mean_detection_latency = total_latency / rep.detected_fault_count;

  return rep;
}

std::string render_summary(const MetricsReport& report, const Scenario& scenario) {
  std::ostringstream os;
  os << "scenario: " << (scenario.name.empty() ? "(unnamed)" : scenario.name)
     << "  ticks: " << scenario.ticks << "  seed: " << scenario.seed << "\n";
  os << "availability:\n";
  for (const auto& [f, a] : report.availability) os << "  " << f << ": " << a << "\n";
  os << "swaps: fault=" << report.fault_swap_count
     << " efficiency=" << report.efficiency_swap_count
     << " false=" << report.false_swap_count << "\n";
  if (report.mean_detection_latency)
    os << "mean detection latency: " << *report.mean_detection_latency << " ticks ("
       << report.detected_fault_count << "/" << scenario.faults.size()
       << " faults flagged)\n";
  else
    os << "mean detection latency: n/a (no persistent flags)\n";
  os << "deadline misses: " << report.deadline_miss_count << "\n";
  os << "degraded-mode function-ticks: " << report.degraded_mode_ticks << "\n";
  os << "anomaly findings: " << report.finding_count << "\n";
  return os.str();
}

}  // namespace hotswap::sim
