// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/probes.hpp"

#include <algorithm>

namespace hotswap::probes {

std::string to_string(BoxType b) {
  switch (b) {
    case BoxType::Black: return "BLACK";
    case BoxType::White: return "WHITE";
    case BoxType::Gray: return "GRAY";
    case BoxType::Glass: return "GLASS";
  }
  return "?";
}

std::optional<BoxType> box_from_string(const std::string& s) {
  for (BoxType b : {BoxType::Black, BoxType::White, BoxType::Gray, BoxType::Glass})
    if (to_string(b) == s) return b;
  return std::nullopt;
}

std::string to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::Bias: return "BIAS";
    case CorruptionKind::StuckValue: return "STUCK_VALUE";
    case CorruptionKind::NoiseAmplify: return "NOISE_AMPLIFY";
  }
  return "?";
}

std::optional<CorruptionKind> corruption_from_string(const std::string& s) {
  for (CorruptionKind k : {CorruptionKind::Bias, CorruptionKind::StuckValue,
                           CorruptionKind::NoiseAmplify})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

const std::set<MetricName>& visibility(BoxType box) {
  static const std::set<MetricName> white = {
      MetricName::LatencyMs, MetricName::ErrorRate, MetricName::Throughput};
  static const std::set<MetricName> black = {
      MetricName::CpuLoad, MetricName::TemperatureProxy};
  static const std::set<MetricName> gray = {
      MetricName::LatencyMs, MetricName::CpuLoad, MetricName::ErrorRate};
  static const std::set<MetricName> glass = {
      MetricName::LatencyMs, MetricName::ErrorRate, MetricName::Throughput,
      MetricName::CpuLoad, MetricName::TemperatureProxy};
  switch (box) {
    case BoxType::White: return white;
    case BoxType::Black: return black;
    case BoxType::Gray: return gray;
    case BoxType::Glass: return glass;
  }
  return glass;
}

namespace {

double clamp_metric(MetricName m, double v) {
  switch (m) {
    case MetricName::ErrorRate:
      return std::clamp(v, 0.0, 1.0);
    case MetricName::LatencyMs:
    case MetricName::Throughput:
    case MetricName::CpuLoad:
      return std::max(v, 0.0);
    case MetricName::TemperatureProxy:
      return v;
  }
  return v;
}

}  // namespace

TelemetryRecord sample(const Probe& probe, const ComponentTruth& truth,
                       Tick tick, RngStream& rng) {
  const bool corrupt_active =
      probe.corruption && tick >= probe.corruption->onset;
  double noise_width = probe.noise_half_width;
  if (corrupt_active && probe.corruption->kind == CorruptionKind::NoiseAmplify)
    noise_width *= probe.corruption->value;

  TelemetryRecord rec;
  rec.tick = tick;
  rec.probe = probe.id;
  rec.target = probe.target;

  const auto& vis = visibility(probe.box);
  for (MetricName m : kAllMetrics) {
    // draw unconditionally: stream position is independent of visibility
    const double noise = rng.next_symmetric(noise_width);
    auto it = truth.metrics.find(m);
    if (it == truth.metrics.end()) continue;
    double v = it->second + noise;
    if (corrupt_active && probe.corruption->kind != CorruptionKind::NoiseAmplify &&
        probe.corruption->metric == m) {
      if (probe.corruption->kind == CorruptionKind::Bias)
        v += probe.corruption->value;
      else  // StuckValue
        v = probe.corruption->value;
    }
    if (vis.count(m)) rec.metrics[m] = clamp_metric(m, v);
  }
  return rec;
}

std::vector<Probe> substitute_glass(const std::vector<Probe>& probe_set,
                                    double gray_fraction, RngStream& rng) {
  std::vector<Probe> out = probe_set;
  for (Probe& p : out) {
    switch (p.box) {
      case BoxType::Black:
        p.box = BoxType::Glass;
        break;
      case BoxType::Gray:
        if (rng.next_unit() < gray_fraction) p.box = BoxType::Glass;
        break;
      case BoxType::White:
      case BoxType::Glass:
        break;
    }
  }
  return out;
}

}  // namespace hotswap::probes
