// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/integrity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hotswap::integrity {

std::string to_string(TrustStatus s) {
  switch (s) {
    case TrustStatus::Trusted: return "TRUSTED";
    case TrustStatus::Distrusted: return "DISTRUSTED";
    case TrustStatus::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

std::string to_string(FindingKind k) {
  return k == FindingKind::Rule ? "RULE" : "STATISTICAL";
}

std::string to_string(Health h) {
  switch (h) {
    case Health::Healthy: return "HEALTHY";
    case Health::Degraded: return "DEGRADED";
    case Health::Faulty: return "FAULTY";
    case Health::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

bool windows_agree(const ProbeWindow& a, const ProbeWindow& b, double tolerance) {
  // Disjoint visibility yields no evidence of disagreement.
  for (const auto& [metric, va] : a.means) {
    auto it = b.means.find(metric);
    if (it == b.means.end()) continue;
    const double vb = it->second;
    const double diff = std::fabs(va - vb);
    if (diff > tolerance * std::max(std::fabs(va), std::fabs(vb)) && diff > 1e-12)
      return false;
  }
  return true;
}

double median_of(std::vector<double> v) {
  const size_t n = v.size();
  const size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return (v[mid - 1] + hi) / 2.0;
}

}  // namespace

std::vector<TrustVerdict> assess_stream_validity(
    const std::vector<ProbeWindow>& windows, double tolerance) {
  std::vector<TrustVerdict> out;
  out.reserve(windows.size());

  std::vector<size_t> live;  // probes with records this window
  for (size_t i = 0; i < windows.size(); ++i)
    if (!windows[i].empty) live.push_back(i);

  if (live.empty()) {
    for (const auto& w : windows)
      out.push_back({w.probe, TrustStatus::Unresolved, 0.0});
    return out;
  }

  const size_t n = live.size();
  std::vector<std::vector<bool>> agree(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      agree[i][j] = (i == j) ||
                    windows_agree(windows[live[i]], windows[live[j]], tolerance);

  // Largest agreement clique by subset enumeration; probe counts per target
  // are small. Ties go to the lexicographically smallest probe-id set.
  std::vector<size_t> best;
  std::vector<std::string> best_ids;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    bool clique = true;
    for (size_t a = 0; a < members.size() && clique; ++a)
      for (size_t b = a + 1; b < members.size(); ++b)
        if (!agree[members[a]][members[b]]) { clique = false; break; }
    if (!clique) continue;
    std::vector<std::string> ids;
    for (size_t i : members) ids.push_back(windows[live[i]].probe);
    std::sort(ids.begin(), ids.end());
    if (members.size() > best.size() ||
        (members.size() == best.size() && ids < best_ids)) {
      best = members;
      best_ids = ids;
    }
  }

  const bool strict_majority = best.size() * 2 > n;
  std::vector<TrustStatus> status(windows.size(), TrustStatus::Unresolved);
  if (strict_majority) {
    for (size_t i : live) status[i] = TrustStatus::Distrusted;
    for (size_t i : best) status[live[i]] = TrustStatus::Trusted;
  }

  for (size_t i = 0; i < windows.size(); ++i) {
    double evidence = 1.0;
    if (!windows[i].empty && n > 1) {
      size_t li = 0;
      while (live[li] != i) ++li;
      size_t agreeing = 0;
      for (size_t j = 0; j < n; ++j)
        if (j != li && agree[li][j]) ++agreeing;
      evidence = static_cast<double>(agreeing) / static_cast<double>(n - 1);
    } else if (windows[i].empty) {
      evidence = 0.0;
    }
    out.push_back({windows[i].probe, status[i], evidence});
  }
  return out;
}

std::vector<AnomalyFinding> detect_rule_based(const probes::TelemetryRecord& record,
                                              const std::vector<ThresholdRule>& rules) {
  std::vector<AnomalyFinding> out;
  for (const auto& rule : rules) {
    auto it = record.metrics.find(rule.metric);
    if (it == record.metrics.end()) continue;
    const double v = it->second;
    const bool violated =
        rule.comparator == '>' ? v > rule.threshold : v < rule.threshold;
    if (!violated) continue;
    AnomalyFinding f;
    f.target = record.target;
    f.metric = rule.metric;
    f.window_end = record.tick;
    f.score = std::fabs(v - rule.threshold) / std::fabs(rule.threshold);
    f.kind = FindingKind::Rule;
    out.push_back(f);
  }
  return out;
}

std::map<std::string, double> detect_statistical_peer(
    const std::map<std::string, double>& window_means) {
  std::map<std::string, double> scores;
  if (window_means.size() < 2) return scores;  // abstain

  std::vector<double> values;
  values.reserve(window_means.size());
  for (const auto& [id, v] : window_means) values.push_back(v);

  const double median = median_of(values);
  std::vector<double> deviations;
  deviations.reserve(values.size());
  for (double v : values) deviations.push_back(std::fabs(v - median));
  const double mad = median_of(deviations);

  for (const auto& [id, v] : window_means) {
    if (mad == 0.0) {
      scores[id] = (v == median) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      scores[id] = 0.6745 * std::fabs(v - median) / mad;
    }
  }
  return scores;
}

HealthAssessment assemble_assessment(const std::string& target, Tick window_end,
                                     bool trusted_coverage,
                                     std::vector<AnomalyFinding> findings,
                                     std::optional<double> eff) {
  HealthAssessment a;
  a.tick = window_end;
  a.target = target;
  a.findings = std::move(findings);
  a.efficiency_estimate = eff;
  if (!trusted_coverage) {
    a.health = Health::Unknown;
    a.findings.clear();
    a.efficiency_estimate.reset();
    return a;
  }
  a.health = Health::Healthy;
  for (const auto& f : a.findings) {
    if (f.persistent) { a.health = Health::Faulty; break; }
    a.health = Health::Degraded;
  }
  return a;
}

namespace {

std::string streak_key(const std::string& target, MetricName metric, FindingKind kind) {
  return target + "\x1f" + to_string(metric) + "\x1f" + to_string(kind);
}

}  // namespace

IntegrityModule::WindowOutput IntegrityModule::process(const WindowInput& input) {
  WindowOutput out;

  // trust arbitration and trusted per-metric means per target
  std::map<std::string, MetricMap> trusted_means;
  std::map<std::string, bool> coverage;
  for (const auto& [target, windows] : input.by_target) {
    auto verdicts = assess_stream_validity(windows, config_.pair_tolerance);
    bool any_trusted = false;
    MetricMap sums;
    std::map<MetricName, int> counts;
    for (size_t i = 0; i < windows.size(); ++i) {
      if (verdicts[i].status != TrustStatus::Trusted) continue;
      any_trusted = true;
      for (const auto& [m, v] : windows[i].means) {
        sums[m] += v;
        counts[m]++;
      }
    }
    MetricMap means;
    for (const auto& [m, sum] : sums) means[m] = sum / counts[m];
    trusted_means[target] = std::move(means);
    coverage[target] = any_trusted;
    out.verdicts[target] = std::move(verdicts);
  }

  // detection over trusted data only
  std::map<std::string, std::vector<AnomalyFinding>> findings;
  for (const auto& [target, means] : trusted_means) {
    if (!coverage[target]) continue;
    probes::TelemetryRecord pseudo;
    pseudo.tick = input.window_end;
    pseudo.target = target;
    pseudo.metrics = means;
    for (auto& f : detect_rule_based(pseudo, config_.rules))
      findings[target].push_back(std::move(f));
  }
  for (const auto& [function, peers] : input.peer_groups) {
    (void)function;
    for (MetricName metric : kAllMetrics) {
      std::map<std::string, double> peer_means;
      for (const auto& replica : peers) {
        auto tit = trusted_means.find(replica);
        if (tit == trusted_means.end() || !coverage[replica]) continue;
        auto mit = tit->second.find(metric);
        if (mit != tit->second.end()) peer_means[replica] = mit->second;
      }
      if (peer_means.size() < 2) continue;  // detector abstains
      for (const auto& [replica, score] : detect_statistical_peer(peer_means)) {
        if (!(score > config_.tau)) continue;
        AnomalyFinding f;
        f.target = replica;
        f.metric = metric;
        f.window_end = input.window_end;
        f.score = score;
        f.kind = FindingKind::Statistical;
        findings[replica].push_back(std::move(f));
      }
    }
  }

  // persistence: streaks advance on consecutive flagged windows only
  std::map<std::string, bool> flagged_now;
  for (auto& [target, fs] : findings)
    for (auto& f : fs) {
      const std::string key = streak_key(target, f.metric, f.kind);
      if (!flagged_now[key]) {
        flagged_now[key] = true;
        streaks_[key]++;
      }
      f.persistent = streaks_[key] >= config_.persistence_windows;
      if (f.persistent && !was_persistent_[key]) {
        was_persistent_[key] = true;
        out.newly_persistent.push_back(f);
      }
    }
  for (auto it = streaks_.begin(); it != streaks_.end();) {
    if (!flagged_now.count(it->first)) {
      was_persistent_.erase(it->first);
      it = streaks_.erase(it);
    } else {
      ++it;
    }
  }

  // assessments for every probed target
  for (const auto& [target, windows] : input.by_target) {
    (void)windows;
    std::optional<double> eff;
    auto rit = input.replica_info.find(target);
    if (coverage[target] && rit != input.replica_info.end())
      eff = efficiency_estimate(trusted_means[target], rit->second.deadline_ticks,
                                rit->second.nominal_throughput);
    auto fit = findings.find(target);
    out.assessments.push_back(assemble_assessment(
        target, input.window_end, coverage[target],
        fit == findings.end() ? std::vector<AnomalyFinding>{} : fit->second, eff));
  }
  return out;
}

void IntegrityModule::reset_target(const std::string& target) {
  const std::string prefix = target + "\x1f";
  for (auto it = streaks_.begin(); it != streaks_.end();) {
    if (it->first.rfind(prefix, 0) == 0) it = streaks_.erase(it);
    else ++it;
  }
  for (auto it = was_persistent_.begin(); it != was_persistent_.end();) {
    if (it->first.rfind(prefix, 0) == 0) it = was_persistent_.erase(it);
    else ++it;
  }
}

double efficiency_estimate(const MetricMap& means, Tick deadline_ticks,
                           double nominal_throughput) {
  double eff = 1.0;
  if (auto it = means.find(MetricName::LatencyMs); it != means.end()) {
    const double d = static_cast<double>(deadline_ticks);
    eff *= std::clamp((d - it->second) / d, 0.0, 1.0);
  }
  if (auto it = means.find(MetricName::ErrorRate); it != means.end())
    eff *= std::clamp(1.0 - it->second, 0.0, 1.0);
  if (auto it = means.find(MetricName::Throughput); it != means.end() &&
      nominal_throughput > 0.0)
    eff *= std::clamp(it->second / nominal_throughput, 0.0, 1.0);
  return std::clamp(eff, 0.0, 1.0);
}

}  // namespace hotswap::integrity
