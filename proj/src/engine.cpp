// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace hotswap::sim {

using nlohmann::json;
using core::LifecycleEvent;
using core::LifecycleState;
using core::Replica;

namespace {

double json_safe(double v) {
  // infinity sentinels from the peer detector must survive serialization
  if (std::isinf(v)) return std::numeric_limits<double>::max();
  return v;
}

}  // namespace

struct Engine::Impl {
  Scenario s;
  core::Topology topo;
  integrity::IntegrityModule im;

  struct ProbeRt {
    probes::Probe probe;
    bool detached = false;
    RngStream rng;
    std::vector<probes::TelemetryRecord> window;
  };
  std::vector<ProbeRt> probe_rt;

  // per fault: targets whose healable effect was cleared by reconfiguration
  std::vector<std::set<std::string>> fault_cleared;

  std::map<std::string, probes::ComponentTruth> truths;
  std::map<std::string, integrity::Health> health;
  std::map<std::string, double> efficiency;
  std::map<std::string, int> streaks;
  std::map<std::string, integrity::TrustStatus> last_trust;

  struct PendingActivation {
    Tick due;
    confidence::SwapCommand cmd;
  };
  std::vector<PendingActivation> pending;
  std::map<std::string, bool> pending_promotion;

  std::vector<swapexec::HealingJob> heal_jobs;
  std::map<std::string, std::vector<std::pair<Tick, std::string>>> hw_blacklist_history;
  std::map<std::string, Tick> deadline_miss_accum;

  std::vector<SimEvent> log;
  std::uint64_t seq = 0;
  std::function<void(const probes::TelemetryRecord&)> telemetry_sink;

  explicit Impl(Scenario scenario)
      : s(std::move(scenario)), topo(s.topology), im(s.detector) {
    for (const auto& p : s.probes)
      probe_rt.push_back({p, false, RngStream(s.seed, "probe:" + p.id), {}});
    fault_cleared.resize(s.faults.size());
    for (auto& r : topo.replicas) {
      const core::FunctionRole* f = topo.find_function(r.function);
      const double nominal_thr = r.nominal.count(MetricName::Throughput)
                                     ? r.nominal.at(MetricName::Throughput) : 0.0;
      const double eff = integrity::efficiency_estimate(
          r.nominal, f ? f->deadline_ticks : 1, nominal_thr);
      r.efficiency_score = eff;
      efficiency[r.id] = eff;
    }
  }

  void emit(Tick tick, Phase phase, const char* kind, json payload) {
    log.push_back({tick, static_cast<int>(phase), seq++, kind, std::move(payload)});
  }

  // Apply one lifecycle event to a replica, with full bookkeeping.
  // attempts_override substitutes the heal-attempt count used by the
  // transition table (heal scheduling increments the counter before the
  // HealStarted transition is recorded).
  LifecycleState apply_lifecycle(Replica& r, LifecycleEvent e, Tick tick, Phase phase,
                                 int attempts_override = -1) {
    const int attempts = attempts_override >= 0 ? attempts_override : r.heal_attempts;
    const LifecycleState from = r.state;
    const LifecycleState to =
        core::transition(from, e, attempts, s.heal.max_heal_attempts);
    r.state = to;
    if (e == LifecycleEvent::BlacklistConfirmed) {
      r.certified = false;
      im.reset_target(r.id);
      health.erase(r.id);
    }
    if (e == LifecycleEvent::TestPassed) r.certified = true;
    emit(tick, phase, event_kind::LifecycleTransition,
         {{"replica", r.id},
          {"event", core::to_string(e)},
          {"from", core::to_string(from)},
          {"to", core::to_string(to)}});
    return to;
  }

  const MetricMap* nominal_of(const std::string& id) {
    if (const Replica* r = topo.find_replica(id)) return &r->nominal;
    if (const core::VmPlatform* v = topo.find_vm(id)) return &v->nominal;
    if (const core::HardwarePlatform* h = topo.find_hardware(id)) return &h->nominal;
    return nullptr;
  }

  Tick deadline_of_target(const std::string& id) {
    if (const Replica* r = topo.find_replica(id))
      if (const core::FunctionRole* f = topo.find_function(r->function))
        return f->deadline_ticks;
    return 1;
  }

  void phase_faults(Tick t) {
    for (size_t i = 0; i < s.faults.size(); ++i) {
      const FaultSpec& f = s.faults[i];
      if (t == f.onset)
        emit(t, Phase::FaultApplication, event_kind::FaultOnset,
             {{"fault", i}, {"class", to_string(f.klass)}, {"targets", f.all_targets()}});
      if (f.duration && t == f.onset + *f.duration)
        emit(t, Phase::FaultApplication, event_kind::FaultCleared,
             {{"fault", i}, {"reason", "expired"}});
    }
    truths.clear();
    for (const auto& r : topo.replicas) truths[r.id] = {r.nominal};
    for (const auto& v : topo.vm_platforms) truths[v.id] = {v.nominal};
    for (const auto& h : topo.hardware_platforms) truths[h.id] = {h.nominal};
    for (size_t i = 0; i < s.faults.size(); ++i) {
      const FaultSpec& f = s.faults[i];
      if (!f.active_at(t)) continue;
      for (const auto& target : f.all_targets()) {
        if (fault_cleared[i].count(target)) continue;
        auto it = truths.find(target);
        if (it == truths.end()) continue;
        inject(f, it->second, t, deadline_of_target(target));
      }
    }
  }

  void phase_sampling(Tick t) {
    for (auto& prt : probe_rt) {
      if (prt.detached) continue;
      const Replica* r = topo.find_replica(prt.probe.target);
      if (r && r->state == LifecycleState::Retired) {
        prt.detached = true;
        prt.window.clear();
        emit(t, Phase::Sampling, event_kind::ProbeDetached,
             {{"probe", prt.probe.id}, {"target", prt.probe.target}});
        continue;
      }
      auto rec = probes::sample(prt.probe, truths.at(prt.probe.target), t, prt.rng);
      if (telemetry_sink) telemetry_sink(rec);
      prt.window.push_back(std::move(rec));
    }
  }

  integrity::IntegrityModule::WindowInput build_window_input(Tick window_end) {
    integrity::IntegrityModule::WindowInput in;
    in.window_end = window_end;
    for (auto& prt : probe_rt) {
      if (prt.detached) continue;
      integrity::ProbeWindow pw;
      pw.probe = prt.probe.id;
      pw.box = prt.probe.box;
      pw.empty = prt.window.empty();
      MetricMap sums;
      std::map<MetricName, int> counts;
      for (const auto& rec : prt.window)
        for (const auto& [m, v] : rec.metrics) {
          sums[m] += v;
          counts[m]++;
        }
      for (const auto& [m, sum] : sums) pw.means[m] = sum / counts[m];
      in.by_target[prt.probe.target].push_back(std::move(pw));
      prt.window.clear();
    }
    for (const auto& f : topo.functions) {
      std::vector<std::string> peers;
      for (const auto& r : topo.replicas) {
        if (r.function != f.id) continue;
        if (r.state == LifecycleState::Active || r.state == LifecycleState::Standby ||
            r.state == LifecycleState::Suspect)
          peers.push_back(r.id);
      }
      if (peers.size() >= 2) in.peer_groups[f.id] = std::move(peers);
    }
    for (const auto& r : topo.replicas) {
      integrity::IntegrityModule::PeerInfo info;
      info.deadline_ticks = deadline_of_target(r.id);
      info.nominal_throughput = r.nominal.count(MetricName::Throughput)
                                    ? r.nominal.at(MetricName::Throughput) : 0.0;
      in.replica_info[r.id] = info;
    }
    return in;
  }

  void phase_integrity(Tick t) {
    auto out = im.process(build_window_input(t));

    for (const auto& [target, verdicts] : out.verdicts) {
      (void)target;
      for (const auto& v : verdicts) {
        auto prev = last_trust.find(v.probe);
        if (v.status == integrity::TrustStatus::Distrusted &&
            (prev == last_trust.end() ||
             prev->second != integrity::TrustStatus::Distrusted))
          emit(t, Phase::Integrity, event_kind::ProbeDistrusted,
               {{"probe", v.probe}, {"evidence", v.evidence}});
        last_trust[v.probe] = v.status;
      }
    }

    for (const auto& f : out.newly_persistent)
      emit(t, Phase::Integrity, event_kind::AnomalyPersistent,
           {{"target", f.target},
            {"metric", to_string(f.metric)},
            {"kind", integrity::to_string(f.kind)},
            {"score", json_safe(f.score)}});

    for (const auto& a : out.assessments) {
      json findings = json::array();
      for (const auto& f : a.findings)
        findings.push_back({{"metric", to_string(f.metric)},
                            {"kind", integrity::to_string(f.kind)},
                            {"score", json_safe(f.score)},
                            {"persistent", f.persistent}});
      emit(t, Phase::Integrity, event_kind::Assessment,
           {{"target", a.target},
            {"health", integrity::to_string(a.health)},
            {"efficiency", a.efficiency_estimate ? json(*a.efficiency_estimate) : json()},
            {"findings", findings}});
      if (topo.find_replica(a.target)) {
        health[a.target] = a.health;
        if (a.efficiency_estimate) {
          efficiency[a.target] = *a.efficiency_estimate;
          topo.find_replica(a.target)->efficiency_score = *a.efficiency_estimate;
        }
      }
    }

    // protocol reaction: persistent fault evidence suspends the incumbent,
    // a cleared suspect rejoins the standby pool
    for (auto& r : topo.replicas) {
      auto hit = health.find(r.id);
      if (hit == health.end()) continue;
      if (hit->second == integrity::Health::Faulty &&
          r.state == LifecycleState::Active)
        apply_lifecycle(r, LifecycleEvent::AnomalyFlagged, t, Phase::Integrity);
      else if (hit->second == integrity::Health::Healthy &&
               r.state == LifecycleState::Suspect)
        apply_lifecycle(r, LifecycleEvent::Demote, t, Phase::Integrity);
    }
  }

  std::vector<confidence::SwapCommand> phase_confidence(Tick t) {
    confidence::DecisionInputs in;
    in.now = t;
    in.swap_latency = s.swap.latency_ticks;
    in.health = health;
    in.efficiency = efficiency;
    in.pending_promotion = pending_promotion;
    auto outcome = confidence::decide(in, topo, s.demand, s.policy, streaks);
    for (const auto& c : outcome.commands)
      emit(t, Phase::Confidence, event_kind::SwapCommandIssued,
           {{"function", c.function},
            {"demote", c.demote},
            {"promote", c.promote},
            {"reason", confidence::to_string(c.reason)},
            {"expected_latency", c.expected_latency}});
    for (const auto& f : outcome.degraded_functions)
      emit(t, Phase::Confidence, event_kind::DegradedMode, {{"function", f}});
    return std::move(outcome.commands);
  }

  std::vector<std::string> phase_swapexec(Tick t,
                                          const std::vector<confidence::SwapCommand>& cmds) {
    std::vector<std::string> newly_blacklisted;

    // due deferred promotions first
    for (auto it = pending.begin(); it != pending.end();) {
      if (it->due > t) { ++it; continue; }
      const auto cmd = it->cmd;
      it = pending.erase(it);
      pending_promotion[cmd.function] = false;
      Replica* target = topo.find_replica(cmd.promote);
      if (target && confidence::promotable(topo, *target)) {
        apply_lifecycle(*target, LifecycleEvent::Promote, t, Phase::SwapExecution);
        emit(t, Phase::SwapExecution, event_kind::SwapCompleted,
             {{"function", cmd.function},
              {"demote", cmd.demote},
              {"promote", cmd.promote},
              {"reason", confidence::to_string(cmd.reason)},
              {"command_tick", cmd.tick},
              {"completed_tick", t},
              {"gap_ticks", t - cmd.tick}});
      } else {
        emit(t, Phase::SwapExecution, event_kind::StaleCommand,
             {{"function", cmd.function},
              {"promote", cmd.promote},
              {"reason", "promote target no longer eligible at activation"}});
      }
    }

    for (const auto& cmd : cmds) {
      auto result = swapexec::execute_swap(cmd, t, s.swap, topo);
      if (result.stale) {
        emit(t, Phase::SwapExecution, event_kind::StaleCommand,
             {{"function", cmd.function},
              {"promote", cmd.promote},
              {"reason", result.stale_reason}});
        continue;
      }
      for (const auto& ch : result.changes) {
        emit(t, Phase::SwapExecution, event_kind::LifecycleTransition,
             {{"replica", ch.replica},
              {"event", core::to_string(ch.event)},
              {"from", core::to_string(ch.from)},
              {"to", core::to_string(ch.to)}});
        if (ch.event == LifecycleEvent::BlacklistConfirmed) {
          im.reset_target(ch.replica);
          health.erase(ch.replica);
          newly_blacklisted.push_back(ch.replica);
        }
      }
      if (result.deferred_promote) {
        pending.push_back({result.execution->handover_complete, cmd});
        pending_promotion[cmd.function] = true;
      } else {
        emit(t, Phase::SwapExecution, event_kind::SwapCompleted,
             {{"function", cmd.function},
              {"demote", cmd.demote},
              {"promote", cmd.promote},
              {"reason", confidence::to_string(cmd.reason)},
              {"command_tick", cmd.tick},
              {"completed_tick", t},
              {"gap_ticks", result.execution->gap_ticks}});
      }
    }
    return newly_blacklisted;
  }

  void schedule_heal_for(Replica& r, Tick t) {
    if (r.heal_attempts >= s.heal.max_heal_attempts) {
      apply_lifecycle(r, LifecycleEvent::HealStarted, t, Phase::Lifecycle);  // -> RETIRED
      return;
    }
    auto job = swapexec::schedule_heal(r.id, t, s.heal, topo);
    apply_lifecycle(r, LifecycleEvent::HealStarted, t, Phase::Lifecycle,
                    r.heal_attempts - 1);  // pre-increment count decides
    emit(t, Phase::Lifecycle, event_kind::HealScheduled,
         {{"replica", r.id},
          {"attempt", job.attempt},
          {"reboot_until", job.reboot_until},
          {"reconfigure_until", job.reconfigure_until},
          {"test_until", job.test_until}});
    heal_jobs.push_back(job);
  }

  void phase_lifecycle(Tick t, std::vector<std::string> newly_blacklisted) {
    // healing pipeline progress
    for (auto it = heal_jobs.begin(); it != heal_jobs.end();) {
      swapexec::HealingJob& job = *it;
      Replica* r = topo.find_replica(job.replica);
      if (!r) { it = heal_jobs.erase(it); continue; }
      if (t == job.reconfigure_until) {
        for (size_t i = 0; i < s.faults.size(); ++i) {
          const FaultSpec& f = s.faults[i];
          if (!f.healable() || f.onset > t) continue;
          for (const auto& target : f.all_targets())
            if (target == r->id && !fault_cleared[i].count(target)) {
              fault_cleared[i].insert(target);
              emit(t, Phase::Lifecycle, event_kind::FaultCleared,
                   {{"fault", i}, {"target", target}, {"reason", "healed"}});
            }
        }
        apply_lifecycle(*r, LifecycleEvent::HealComplete, t, Phase::Lifecycle);
      }
      if (t == job.test_until) {
        bool permanent = false;
        for (const auto& f : s.faults)
          if (f.klass == FaultClass::PermanentCrash && f.onset <= t)
            for (const auto& target : f.all_targets())
              if (target == r->id) permanent = true;
        const auto outcome = swapexec::resolve_test(job, permanent);
        emit(t, Phase::Lifecycle, event_kind::TestResolved,
             {{"replica", r->id},
              {"attempt", job.attempt},
              {"outcome", swapexec::to_string(outcome)}});
        const auto next = apply_lifecycle(
            *r,
            outcome == swapexec::TestOutcome::Pass ? LifecycleEvent::TestPassed
                                                   : LifecycleEvent::TestFailed,
            t, Phase::Lifecycle);
        if (next == LifecycleState::Blacklisted) newly_blacklisted.push_back(r->id);
        it = heal_jobs.erase(it);
        continue;
      }
      ++it;
    }

    for (const auto& id : newly_blacklisted) {
      Replica* r = topo.find_replica(id);
      if (!r || r->state != LifecycleState::Blacklisted) continue;
      if (const core::HardwarePlatform* hw = topo.hardware_of(*r))
        hw_blacklist_history[hw->id].push_back({t, id});
      schedule_heal_for(*r, t);
    }

    // chronic hardware: several distinct hosted replicas blacklisted in a window
    for (auto& hw : topo.hardware_platforms) {
      if (hw.blacklisted) continue;
      auto hit = hw_blacklist_history.find(hw.id);
      if (hit == hw_blacklist_history.end()) continue;
      std::set<std::string> distinct;
      for (const auto& [tick, replica] : hit->second)
        if (tick > t - s.hardware_blacklist.window_ticks) distinct.insert(replica);
      if (static_cast<int>(distinct.size()) >= s.hardware_blacklist.replica_threshold) {
        hw.blacklisted = true;
        emit(t, Phase::Lifecycle, event_kind::HardwareBlacklisted,
             {{"hardware", hw.id},
              {"replicas", std::vector<std::string>(distinct.begin(), distinct.end())}});
      }
    }

    // safety checks, every tick
    for (const auto& f : topo.functions)
      core::active_replica(topo, f.id);  // throws MultipleActive on corruption

    // deadline accounting against ground truth
    for (const auto& f : topo.functions) {
      auto active = core::active_replica(topo, f.id);
      if (!active) continue;
      const auto& truth = truths.at(*active);
      auto lit = truth.metrics.find(MetricName::LatencyMs);
      if (lit != truth.metrics.end() &&
          lit->second > static_cast<double>(f.deadline_ticks))
        deadline_miss_accum[f.id]++;
    }
    if ((t + 1) % s.detector.window_ticks == 0) {
      for (const auto& f : topo.functions) {
        auto mit = deadline_miss_accum.find(f.id);
        if (mit != deadline_miss_accum.end() && mit->second > 0) {
          emit(t, Phase::Lifecycle, event_kind::DeadlineMiss,
               {{"function", f.id}, {"ticks", mit->second}});
          mit->second = 0;
        }
      }
    }
  }

  RunResult run() {
    RunResult result;
    try {
      for (Tick t = 0; t < s.ticks; ++t) {
        phase_faults(t);
        phase_sampling(t);
        std::vector<confidence::SwapCommand> cmds;
        if ((t + 1) % s.detector.window_ticks == 0) {
          phase_integrity(t);
          cmds = phase_confidence(t);
        }
        auto newly_blacklisted = phase_swapexec(t, cmds);
        phase_lifecycle(t, std::move(newly_blacklisted));
      }
    } catch (const core::MultipleActive& e) {
      emit(s.ticks, Phase::Lifecycle, event_kind::ProtocolViolation,
           {{"error", "MultipleActive"}, {"detail", e.what()}});
      result.aborted = true;
      result.abort_reason = e.what();
    } catch (const core::IllegalTransition& e) {
      emit(s.ticks, Phase::Lifecycle, event_kind::ProtocolViolation,
           {{"error", "IllegalTransition"}, {"detail", e.what()}});
      result.aborted = true;
      result.abort_reason = e.what();
    }
    result.log = log;
    result.metrics = compute_metrics(result.log, s);
    return result;
  }
};

Engine::Engine(Scenario scenario) : impl_(std::make_unique<Impl>(std::move(scenario))) {}
Engine::~Engine() = default;

void Engine::set_telemetry_sink(std::function<void(const probes::TelemetryRecord&)> sink) {
  impl_->telemetry_sink = std::move(sink);
}

RunResult Engine::run() { return impl_->run(); }

RunResult run_scenario(const Scenario& scenario) {
  Engine engine(scenario);
  return engine.run();
}

}  // namespace hotswap::sim
