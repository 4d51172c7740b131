// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hotswap/core.hpp"
#include "hotswap/probes.hpp"

namespace hotswap::integrity {

enum class TrustStatus { Trusted, Distrusted, Unresolved };
std::string to_string(TrustStatus s);

struct TrustVerdict {
  std::string probe;
  TrustStatus status = TrustStatus::Unresolved;
  double evidence = 0.0;  // fraction of other probes this probe agrees with
};

enum class FindingKind { Rule, Statistical };
std::string to_string(FindingKind k);

struct AnomalyFinding {
  std::string target;
  MetricName metric = MetricName::LatencyMs;
  Tick window_end = 0;
  double score = 0.0;
  FindingKind kind = FindingKind::Rule;
  bool persistent = false;
};

enum class Health { Healthy, Degraded, Faulty, Unknown };
std::string to_string(Health h);

struct HealthAssessment {
  Tick tick = 0;  // window end
  std::string target;
  Health health = Health::Unknown;
  std::vector<AnomalyFinding> findings;
  std::optional<double> efficiency_estimate;  // replicas only
};

// One probe's aggregate over the current window.
struct ProbeWindow {
  std::string probe;
  probes::BoxType box = probes::BoxType::White;
  MetricMap means;   // per-metric window means (visible metrics only)
  bool empty = true; // no records this window
};

// Cross-probe trust arbitration for one target. Probes whose per-metric window
// means pairwise agree (within relative `tolerance` on every shared metric)
// form agreement cliques; the largest strict-majority clique is TRUSTED and
// everything outside it DISTRUSTED. Without a strict majority, or with empty
// windows, all probes are UNRESOLVED. A single probe is trusted vacuously.
std::vector<TrustVerdict> assess_stream_validity(
    const std::vector<ProbeWindow>& windows, double tolerance);

struct ThresholdRule {
  MetricName metric = MetricName::LatencyMs;
  char comparator = '>';  // '>' or '<', strict
  double threshold = 0.0; // nonzero (validated at parse)
};

// One finding per violated rule; score = |value - threshold| / threshold.
// Rules on metrics absent from the record are skipped.
std::vector<AnomalyFinding> detect_rule_based(const probes::TelemetryRecord& record,
                                              const std::vector<ThresholdRule>& rules);

// Peer-comparison detector: robust z-score against the peer median,
// score_i = 0.6745 * |x_i - median| / MAD. With MAD = 0 all-equal vectors
// score 0 and any deviating value gets an infinity sentinel (always flagged).
// Abstains (empty map) with fewer than 2 peers.
std::map<std::string, double> detect_statistical_peer(
    const std::map<std::string, double>& window_means);

// Per-component verdict assembly. `trusted_coverage` says whether at least one
// trusted probe covers the target; findings must already carry persistence.
HealthAssessment assemble_assessment(const std::string& target, Tick window_end,
                                     bool trusted_coverage,
                                     std::vector<AnomalyFinding> findings,
                                     std::optional<double> efficiency_estimate);

// Efficiency of a replica from trusted window means: product of the latency
// headroom against the function deadline, the success rate, and the relative
// throughput, each clamped to [0,1]. Metrics absent from the means contribute 1.
double efficiency_estimate(const MetricMap& means, Tick deadline_ticks,
                           double nominal_throughput);

struct DetectorConfig {
  Tick window_ticks = 20;      // w
  int persistence_windows = 3; // m
  double tau = 3.5;
  double pair_tolerance = 0.05;
  std::vector<ThresholdRule> rules;
};

// The stateful window pipeline: trust arbitration, rule and peer detection,
// persistence tracking, assessment assembly. Owned by the engine loop but
// a pure function of the telemetry it is fed, so the same assessments can be
// recomputed offline from an exported telemetry log.
class IntegrityModule {
 public:
  explicit IntegrityModule(DetectorConfig config) : config_(std::move(config)) {}

  struct PeerInfo {
    Tick deadline_ticks = 1;
    double nominal_throughput = 0.0;
  };

  struct WindowInput {
    Tick window_end = 0;
    // per target, probe windows in stable probe order
    std::map<std::string, std::vector<ProbeWindow>> by_target;
    // function id -> replica ids eligible for peer comparison
    std::map<std::string, std::vector<std::string>> peer_groups;
    // per replica target, the data needed for efficiency estimation
    std::map<std::string, PeerInfo> replica_info;
  };

  struct WindowOutput {
    std::map<std::string, std::vector<TrustVerdict>> verdicts;
    std::vector<HealthAssessment> assessments;  // sorted by target
    std::vector<AnomalyFinding> newly_persistent;
  };

  WindowOutput process(const WindowInput& input);

  // Forget persistence history for a target (called when it is blacklisted;
  // post-heal detection starts from a clean slate).
  void reset_target(const std::string& target);

 private:
  DetectorConfig config_;
  // consecutive flagged windows per (target, metric, kind)
  std::map<std::string, int> streaks_;
  std::map<std::string, bool> was_persistent_;
};

}  // namespace hotswap::integrity
