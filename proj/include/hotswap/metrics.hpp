// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotswap/event.hpp"
#include "hotswap/scenario.hpp"

namespace hotswap::sim {

struct MetricsReport {
  std::map<std::string, double> availability;  // per function, in [0,1]
  std::int64_t fault_swap_count = 0;
  std::int64_t efficiency_swap_count = 0;
  std::optional<double> mean_detection_latency;  // injection -> persistent flag
  std::int64_t detected_fault_count = 0;
  std::int64_t false_swap_count = 0;
  std::int64_t deadline_miss_count = 0;
  std::int64_t degraded_mode_ticks = 0;  // function-ticks without ACTIVE certified replica
  std::int64_t finding_count = 0;        // anomaly findings across all windows

  nlohmann::json to_json() const;
};

// Deterministic recomputation of the report from the event log plus the
// scenario. The engine itself reports through this same function, so an
// offline `report` run over an exported log reproduces run output exactly.
MetricsReport compute_metrics(const std::vector<SimEvent>& log, const Scenario& scenario);

std::string render_summary(const MetricsReport& report, const Scenario& scenario);

}  // namespace hotswap::sim
