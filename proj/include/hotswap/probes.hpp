// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hotswap/core.hpp"
#include "hotswap/rng.hpp"

namespace hotswap::probes {

enum class BoxType { Black, White, Gray, Glass };

std::string to_string(BoxType b);
std::optional<BoxType> box_from_string(const std::string& s);

// Metric set a diagnostic box can observe. WHITE sees the application layer,
// BLACK the platform layer, GRAY a mix, GLASS everything.
const std::set<MetricName>& visibility(BoxType box);

enum class CorruptionKind { Bias, StuckValue, NoiseAmplify };

std::string to_string(CorruptionKind k);
std::optional<CorruptionKind> corruption_from_string(const std::string& s);

// A probe may itself be compromised: the fault machinery can reach the tools
// that are supposed to discover faults.
struct ProbeCorruption {
  CorruptionKind kind = CorruptionKind::Bias;
  MetricName metric = MetricName::LatencyMs;  // ignored for NoiseAmplify
  double value = 0.0;  // bias offset, stuck value, or noise amplification factor
  Tick onset = 0;
};

struct Probe {
  std::string id;
  BoxType box = BoxType::White;
  std::string target;  // replica, vm platform, or hardware platform id
  double noise_half_width = 0.0;  // zero-mean uniform observation noise
  std::optional<ProbeCorruption> corruption;
};

struct TelemetryRecord {
  Tick tick = 0;
  std::string probe;
  std::string target;
  MetricMap metrics;  // keys are a subset of visibility(probe.box)
};

// True ground-truth metrics of one component this tick. Never visible to the
// integrity or confidence modules, only to sampling and to metric scoring.
struct ComponentTruth {
  MetricMap metrics;
};

// Observe `truth` through `probe`: noise first, then active corruption, then
// range clamping, visibility filtering last. One noise draw per metric in
// fixed metric order, so visibility changes never shift the stream.
TelemetryRecord sample(const Probe& probe, const ComponentTruth& truth,
                       Tick tick, RngStream& rng);

// Glass-box substitution: every BLACK probe becomes GLASS on the same target,
// each GRAY probe becomes GLASS with probability gray_fraction (seeded),
// WHITE probes are untouched. Substituted probes keep id/target/noise.
std::vector<Probe> substitute_glass(const std::vector<Probe>& probe_set,
                                    double gray_fraction, RngStream& rng);

}  // namespace hotswap::probes
