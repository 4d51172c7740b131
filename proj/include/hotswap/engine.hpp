// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hotswap/event.hpp"
#include "hotswap/metrics.hpp"
#include "hotswap/scenario.hpp"

namespace hotswap::sim {

// Core-model safety violation during a run; the partial log is preserved in
// the RunResult, the process maps this to exit code 3.
struct ProtocolViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunResult {
  std::vector<SimEvent> log;
  MetricsReport metrics;
  bool aborted = false;
  std::string abort_reason;
};

// Deterministic single-threaded discrete-event engine. Each tick applies
// faults, samples probes, and at window boundaries runs the
// integrity -> confidence -> swap-execution cascade, then lifecycle
// bookkeeping. Identical scenario+seed gives a byte-identical serialized log.
class Engine {
 public:
  explicit Engine(Scenario scenario);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Optional sink receiving every TelemetryRecord as it is sampled.
  void set_telemetry_sink(std::function<void(const probes::TelemetryRecord&)> sink);

  RunResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RunResult run_scenario(const Scenario& scenario);

}  // namespace hotswap::sim
