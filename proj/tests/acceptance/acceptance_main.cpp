// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
//
// Acceptance gate: each criterion prints exactly one PASS/FAIL line.
// Exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hotswap/engine.hpp"
#include "hotswap/rng.hpp"

using namespace hotswap;
using namespace hotswap::sim;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  if (ok) {
    std::cout << "PASS: " << name << "\n";
  } else {
    std::cout << "FAIL: " << name << (detail.empty() ? "" : " (" + detail + ")")
              << "\n";
    failures++;
  }
}

std::string scenario_dir;

Scenario load(const std::string& name) {
  return load_scenario_file(scenario_dir + "/" + name + ".json");
}

std::vector<const SimEvent*> events_of(const std::vector<SimEvent>& log,
                                       const std::string& kind) {
  std::vector<const SimEvent*> out;
  for (const auto& e : log)
    if (e.kind == kind) out.push_back(&e);
  return out;
}

const SimEvent* first_transition(const std::vector<SimEvent>& log,
                                 const std::string& replica,
                                 const std::string& event) {
  for (const auto& e : log)
    if (e.kind == event_kind::LifecycleTransition &&
        e.payload.at("replica") == replica && e.payload.at("event") == event)
      return &e;
  return nullptr;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Clean run: no swaps, perfect availability, zero findings, < 1 s.
void criterion_clean_run() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto res = run_scenario(load("clean_baseline"));
    const double secs = elapsed_s(t0);
    if (res.aborted) { ok = false; why << "aborted: " << res.abort_reason; }
    if (res.metrics.fault_swap_count + res.metrics.efficiency_swap_count != 0) {
      ok = false; why << " swaps nonzero;";
    }
    if (res.metrics.availability.at("f1") != 1.0) {
      ok = false; why << " availability " << res.metrics.availability.at("f1") << ";";
    }
    if (res.metrics.finding_count != 0) {
      ok = false; why << " findings " << res.metrics.finding_count << ";";
    }
    if (secs >= 1.0) { ok = false; why << " runtime " << secs << "s;"; }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("clean run: zero swaps, availability 1.0, zero findings, <1s", ok, why.str());
}

// 2. Crash failover: exact counts, bounded detection latency, RETIRED end state.
void criterion_crash_failover() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto s = load("permanent_crash_failover");
    auto res = run_scenario(s);
    const double wm = static_cast<double>(s.detector.window_ticks *
                                          s.detector.persistence_windows);
    if (res.metrics.fault_swap_count != 1) {
      ok = false; why << "fault swaps " << res.metrics.fault_swap_count << ";";
    }
    if (!res.metrics.mean_detection_latency ||
        *res.metrics.mean_detection_latency > wm) {
      ok = false; why << " detection latency out of bound;";
    }
    const double bound =
        1.0 - (wm + static_cast<double>(s.swap.latency_ticks)) /
                  static_cast<double>(s.ticks);
    if (res.metrics.availability.at("f1") < bound) {
      ok = false;
      why << " availability " << res.metrics.availability.at("f1") << " < " << bound << ";";
    }
    // the crashed replica fails recertification and ends RETIRED
    int fails = 0;
    for (const auto* e : events_of(res.log, event_kind::TestResolved))
      if (e->payload.at("replica") == "r1" && e->payload.at("outcome") == "FAIL")
        fails++;
    if (fails != s.heal.max_heal_attempts) {
      ok = false; why << " failed tests " << fails << ";";
    }
    bool retired = false;
    for (const auto& e : res.log)
      if (e.kind == event_kind::LifecycleTransition &&
          e.payload.at("replica") == "r1" && e.payload.at("to") == "RETIRED")
        retired = true;
    if (!retired) { ok = false; why << " r1 never RETIRED;"; }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("terminal malfunction: one fault swap, bounded latency, replica retired",
         ok, why.str());
}

// 3. Heal loop ordering for a healable drift.
void criterion_heal_loop() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto s = load("latency_drift_heal");
    auto res = run_scenario(s);
    const auto& fault = s.faults.at(0);
    auto persistent = events_of(res.log, event_kind::AnomalyPersistent);
    const Tick flag_bound =
        fault.onset + s.detector.window_ticks * (s.detector.persistence_windows + 1);
    if (persistent.empty() || persistent.front()->tick > flag_bound) {
      ok = false; why << "no persistent flag within bound;";
    }
    if (res.metrics.fault_swap_count < 1) { ok = false; why << " no fault swap;"; }
    const SimEvent* black = first_transition(res.log, "r1", "blacklist_confirmed");
    const SimEvent* heal = first_transition(res.log, "r1", "heal_started");
    const SimEvent* complete = first_transition(res.log, "r1", "heal_complete");
    const SimEvent* passed = first_transition(res.log, "r1", "test_passed");
    if (!black || !heal || !complete || !passed) {
      ok = false; why << " heal chain events missing;";
    } else if (!(black->sequence < heal->sequence &&
                 heal->sequence < complete->sequence &&
                 complete->sequence < passed->sequence)) {
      ok = false; why << " heal chain out of order;";
    } else if (passed->payload.at("to") != "STANDBY") {
      ok = false; why << " recertified replica not STANDBY;";
    }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("heal loop: blacklist < heal_started < heal_complete < test_passed < standby",
         ok, why.str());
}

// 4. Stuck probe distrusted within one window; no false swaps over the run.
void criterion_probe_corruption() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto s = load("probe_corruption_stuck");
    auto res = run_scenario(s);
    auto distrusted = events_of(res.log, event_kind::ProbeDistrusted);
    bool within_window = false;
    for (const auto* e : distrusted)
      if (e->payload.at("probe") == "w_r1c" && e->tick < s.detector.window_ticks)
        within_window = true;
    if (!within_window) { ok = false; why << "corrupted probe not distrusted in window 1;"; }
    if (res.metrics.false_swap_count != 0) {
      ok = false; why << " false swaps " << res.metrics.false_swap_count << ";";
    }
    if (res.metrics.fault_swap_count != 0) {
      ok = false; why << " fault swaps " << res.metrics.fault_swap_count << ";";
    }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("probe corruption: stuck probe distrusted within one window, zero false swaps",
         ok, why.str());
}

// 5. Sub-margin efficiency difference never causes a swap.
void criterion_no_flap() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto res = run_scenario(load("no_flap_oscillation"));
    if (res.metrics.efficiency_swap_count != 0) {
      ok = false; why << "efficiency swaps " << res.metrics.efficiency_swap_count;
    }
    if (res.metrics.fault_swap_count != 0) {
      ok = false; why << " fault swaps " << res.metrics.fault_swap_count;
    }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("no-flap: sub-margin efficiency oscillation causes zero swaps", ok, why.str());
}

// 6. Determinism across every shipped scenario, two seeds each, two runs each.
void criterion_determinism() {
  static const char* kScenarios[] = {
      "clean_baseline",    "permanent_crash_failover", "latency_drift_heal",
      "probe_corruption_stuck", "no_flap_oscillation", "glassbox_mixed",
      "gremlin_burst",     "throughput_droop",         "deadline_creep",
      "hardware_chronic"};
  std::ostringstream why;
  bool ok = true;
  auto t0 = std::chrono::steady_clock::now();
  try {
    for (const char* name : kScenarios) {
      auto s = load(name);
      for (std::uint64_t seed : {s.seed, s.seed + 1000}) {
        Scenario inst = s;
        inst.seed = seed;
        auto a = run_scenario(inst);
        auto b = run_scenario(inst);
        if (serialize_event_log(a.log) != serialize_event_log(b.log)) {
          ok = false;
          why << name << " seed " << seed << " diverged; ";
        }
      }
    }
    const double secs = elapsed_s(t0);
    if (secs >= 30.0) { ok = false; why << "took " << secs << "s"; }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("determinism: 20 scenario instances, repeated runs byte-identical, <30s",
         ok, why.str());
}

// 7. Peer detector against an independent brute-force median/MAD oracle.
void criterion_detector_oracle() {
  std::ostringstream why;
  bool ok = true;
  RngStream rng(20140901, "acceptance-oracle");
  auto brute_median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  for (int iter = 0; iter < 10000 && ok; ++iter) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);  // length 2..6
    std::map<std::string, double> xs;
    std::vector<double> vals;
    for (int i = 0; i < n; ++i) {
      const double v = static_cast<double>(rng.next_u64() % 21);  // {0..20}
      xs["p" + std::to_string(i)] = v;
      vals.push_back(v);
    }
    const double med = brute_median(vals);
    std::vector<double> devs;
    for (double v : vals) devs.push_back(std::fabs(v - med));
    const double mad = brute_median(devs);

    auto scores = integrity::detect_statistical_peer(xs);
    if (scores.size() != xs.size()) { ok = false; why << "missing scores"; break; }
    for (const auto& [id, x] : xs) {
      const double dev = std::fabs(x - med);
      const double expected =
          mad == 0.0 ? (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                     : 0.6745 * dev / mad;
      const double got = scores.at(id);
      const bool equal = std::isinf(expected) ? std::isinf(got) : got == expected;
      if (!equal) {
        ok = false;
        why << "iter " << iter << " " << id << ": got " << got << " want " << expected;
        break;
      }
    }
  }
  report("detector oracle: robust z-scores exactly match brute-force median/MAD",
         ok, why.str());
}

// 8. Lifecycle fuzz: admissible walks never throw, RETIRED is absorbing.
void criterion_lifecycle_fuzz() {
  using S = core::LifecycleState;
  using E = core::LifecycleEvent;
  std::ostringstream why;
  bool ok = true;
  RngStream rng(8, "acceptance-lifecycle-fuzz");
  try {
    for (int run = 0; run < 100000 && ok; ++run) {
      S s = S::Active;
      int attempts = 0;
      const int max_attempts = 1 + static_cast<int>(rng.next_u64() % 4);
      for (int step = 0; step < 32; ++step) {
        const auto events = core::admissible_events(s);
        if (events.empty()) {
          if (s != S::Retired) { ok = false; why << "dead state not RETIRED"; }
          break;
        }
        const E e = events[rng.next_u64() % events.size()];
        const S next = core::transition(s, e, attempts, max_attempts);
        if (s == S::Retired && next != S::Retired) {
          ok = false;
          why << "RETIRED exited";
          break;
        }
        if (e == E::HealStarted && next == S::Healing) attempts++;
        s = next;
      }
    }
  } catch (const core::IllegalTransition& e) {
    ok = false;
    why << "IllegalTransition: " << e.what();
  } catch (const core::MultipleActive& e) {
    ok = false;
    why << "MultipleActive: " << e.what();
  }
  report("lifecycle fuzz: 1e5 admissible walks, no illegal transition, RETIRED absorbing",
         ok, why.str());
}

// 9. Glass substitution: BLACK removed, WHITE preserved, clean detection unchanged.
void criterion_glass_substitution() {
  std::ostringstream why;
  bool ok = true;
  try {
    auto s = load("glassbox_mixed");
    RngStream rng(s.seed, "substitute");
    auto substituted =
        probes::substitute_glass(s.probes, s.glass_substitution_fraction, rng);
    if (substituted.size() != s.probes.size()) { ok = false; why << "probe count changed;"; }
    for (size_t i = 0; i < substituted.size() && ok; ++i) {
      const auto& before = s.probes[i];
      const auto& after = substituted[i];
      if (after.box == probes::BoxType::Black) { ok = false; why << "BLACK survived;"; }
      if (before.box == probes::BoxType::White &&
          after.box != probes::BoxType::White) {
        ok = false; why << "WHITE probe altered;";
      }
      if (after.id != before.id || after.target != before.target) {
        ok = false; why << "identity not preserved;";
      }
    }

    auto base = run_scenario(s);
    Scenario glass = s;
    glass.probes = substituted;
    auto subbed = run_scenario(glass);

    auto detection_fingerprint = [](const RunResult& r) {
      std::ostringstream os;
      for (const auto& e : r.log)
        if (e.kind == event_kind::AnomalyPersistent ||
            e.kind == event_kind::SwapCommandIssued ||
            e.kind == event_kind::ProbeDistrusted)
          os << e.tick << " " << e.kind << " " << e.payload.dump() << "\n";
      os << "findings=" << r.metrics.finding_count
         << " fault=" << r.metrics.fault_swap_count
         << " eff=" << r.metrics.efficiency_swap_count;
      return os.str();
    };
    if (detection_fingerprint(base) != detection_fingerprint(subbed)) {
      ok = false;
      why << " detection results changed under substitution;";
    }
    if (base.metrics.finding_count != 0) { ok = false; why << " clean run had findings;"; }
  } catch (const std::exception& e) { ok = false; why << e.what(); }
  report("glass substitution: BLACK replaced, WHITE preserved, clean detection unchanged",
         ok, why.str());
}

}  // namespace

int main(int argc, char** argv) {
  scenario_dir = argc > 1 ? argv[1] : "scenarios";
  criterion_clean_run();
  criterion_crash_failover();
  criterion_heal_loop();
  criterion_probe_corruption();
  criterion_no_flap();
  criterion_determinism();
  criterion_detector_oracle();
  criterion_lifecycle_fuzz();
  criterion_glass_substitution();
  return failures;
}
