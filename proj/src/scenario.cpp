// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hotswap::sim {

using nlohmann::json;

std::string to_string(FaultClass c) {
  switch (c) {
    case FaultClass::LatencyDrift: return "LATENCY_DRIFT";
    case FaultClass::ErrorBurst: return "ERROR_BURST";
    case FaultClass::ThroughputDroop: return "THROUGHPUT_DROOP";
    case FaultClass::GremlinBurst: return "GREMLIN_BURST";
    case FaultClass::PermanentCrash: return "PERMANENT_CRASH";
    case FaultClass::DeadlineCreep: return "DEADLINE_CREEP";
  }
  return "?";
}

std::optional<FaultClass> fault_class_from_string(const std::string& s) {
  for (FaultClass c : {FaultClass::LatencyDrift, FaultClass::ErrorBurst,
                       FaultClass::ThroughputDroop, FaultClass::GremlinBurst,
                       FaultClass::PermanentCrash, FaultClass::DeadlineCreep})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

bool fault_healable(FaultClass c) { return c != FaultClass::PermanentCrash; }

void inject(const FaultSpec& fault, probes::ComponentTruth& truth, Tick tick,
            Tick deadline_ticks) {
  if (!fault.active_at(tick)) return;
  auto set = [&](MetricName m, double v) { truth.metrics[m] = v; };
  auto get = [&](MetricName m) {
    auto it = truth.metrics.find(m);
    return it == truth.metrics.end() ? 0.0 : it->second;
  };
  switch (fault.klass) {
    case FaultClass::LatencyDrift: {
      const double frac = static_cast<double>(tick - fault.onset) /
                          static_cast<double>(*fault.duration);
      set(MetricName::LatencyMs, get(MetricName::LatencyMs) + fault.magnitude * frac);
      break;
    }
    case FaultClass::ErrorBurst:
    case FaultClass::GremlinBurst:
      set(MetricName::ErrorRate, fault.magnitude);
      break;
    case FaultClass::ThroughputDroop:
      set(MetricName::Throughput, get(MetricName::Throughput) * (1.0 - fault.magnitude));
      break;
    case FaultClass::PermanentCrash:
      set(MetricName::Throughput, 0.0);
      set(MetricName::ErrorRate, 1.0);
      break;
    case FaultClass::DeadlineCreep:
      set(MetricName::LatencyMs,
          static_cast<double>(deadline_ticks) * (1.0 + fault.magnitude));
      break;
  }
}

ParseError::ParseError(std::vector<ParseIssue> iss)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "scenario has " << iss.size() << " problem(s):";
        for (const auto& i : iss) os << "\n  " << i.path << ": " << i.message;
        return os.str();
      }()),
      issues(std::move(iss)) {}

namespace {

struct Parser {
  std::vector<ParseIssue> issues;

  void fail(const std::string& path, const std::string& msg) {
    issues.push_back({path, msg});
  }

  void check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) fail(path, "unknown key: " + it.key());
  }

  std::string req_string(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) { fail(path, std::string("missing key: ") + key); return ""; }
    if (!obj[key].is_string()) { fail(path + "." + key, "expected a string"); return ""; }
    return obj[key].get<std::string>();
  }

  double num(const json& obj, const std::string& path, const char* key,
             double fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(path, std::string("missing key: ") + key);
      return fallback;
    }
    if (!obj[key].is_number()) { fail(path + "." + key, "expected a number"); return fallback; }
    return obj[key].get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& path, const char* key,
                       std::int64_t fallback, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(path, std::string("missing key: ") + key);
      return fallback;
    }
    if (!obj[key].is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return fallback;
    }
    return obj[key].get<std::int64_t>();
  }

  MetricMap nominal_map(const json& obj, const std::string& path,
                        const MetricMap& defaults) {
    MetricMap out = defaults;
    if (!obj.contains("nominal")) return out;
    const json& n = obj["nominal"];
    if (!n.is_object()) { fail(path + ".nominal", "expected an object"); return out; }
    for (auto it = n.begin(); it != n.end(); ++it) {
      auto m = metric_from_string(it.key());
      if (!m) { fail(path + ".nominal", "unknown metric: " + it.key()); continue; }
      if (!it.value().is_number()) {
        fail(path + ".nominal." + it.key(), "expected a number");
        continue;
      }
      out[*m] = it.value().get<double>();
    }
    return out;
  }
};

const MetricMap kReplicaDefaults = {
    {MetricName::LatencyMs, 10.0},   {MetricName::ErrorRate, 0.0},
    {MetricName::Throughput, 100.0}, {MetricName::CpuLoad, 0.3},
    {MetricName::TemperatureProxy, 40.0}};

const MetricMap kPlatformDefaults = {
    {MetricName::LatencyMs, 0.0}, {MetricName::ErrorRate, 0.0},
    {MetricName::CpuLoad, 0.3},   {MetricName::TemperatureProxy, 40.0}};

}  // namespace

Scenario parse_scenario(const json& doc) {
  Parser p;
  Scenario s;

  p.check_keys(doc, "$",
               {"name", "run", "topology", "probes", "detector", "policy", "swap",
                "heal", "hardware_blacklist", "glass_substitution_fraction", "faults"});
  if (!p.issues.empty()) throw ParseError(std::move(p.issues));

  if (doc.contains("name")) {
    if (doc["name"].is_string()) s.name = doc["name"].get<std::string>();
    else p.fail("$.name", "expected a string");
  }

  // run
  if (!doc.contains("run")) p.fail("$", "missing key: run");
  else {
    const json& run = doc["run"];
    p.check_keys(run, "$.run", {"ticks", "seed"});
    s.ticks = p.integer(run, "$.run", "ticks", 1, true);
    if (s.ticks < 1) p.fail("$.run.ticks", "must be >= 1");
    std::int64_t seed = p.integer(run, "$.run", "seed", 0, true);
    if (seed < 0) p.fail("$.run.seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
  }

  // topology
  if (!doc.contains("topology")) p.fail("$", "missing key: topology");
  else {
    const json& t = doc["topology"];
    p.check_keys(t, "$.topology",
                 {"hardware_platforms", "vm_platforms", "functions", "replicas"});
    auto arr = [&](const char* key) -> json {
      if (!t.contains(key) || !t[key].is_array()) {
        p.fail(std::string("$.topology.") + key, "expected an array");
        return json::array();
      }
      return t[key];
    };
    int i = 0;
    for (const json& h : arr("hardware_platforms")) {
      std::string path = "$.topology.hardware_platforms[" + std::to_string(i++) + "]";
      p.check_keys(h, path, {"id", "nominal"});
      core::HardwarePlatform hw;
      hw.id = p.req_string(h, path, "id");
      hw.nominal = p.nominal_map(h, path, kPlatformDefaults);
      s.topology.hardware_platforms.push_back(std::move(hw));
    }
    i = 0;
    for (const json& v : arr("vm_platforms")) {
      std::string path = "$.topology.vm_platforms[" + std::to_string(i++) + "]";
      p.check_keys(v, path, {"id", "hardware", "nominal"});
      core::VmPlatform vm;
      vm.id = p.req_string(v, path, "id");
      vm.hardware = p.req_string(v, path, "hardware");
      vm.nominal = p.nominal_map(v, path, kPlatformDefaults);
      s.topology.vm_platforms.push_back(std::move(vm));
    }
    i = 0;
    for (const json& f : arr("functions")) {
      std::string path = "$.topology.functions[" + std::to_string(i++) + "]";
      p.check_keys(f, path, {"id", "name", "deadline_ticks"});
      core::FunctionRole fr;
      fr.id = p.req_string(f, path, "id");
      fr.name = f.contains("name") && f["name"].is_string()
                    ? f["name"].get<std::string>() : fr.id;
      fr.deadline_ticks = p.integer(f, path, "deadline_ticks", 1, true);
      if (fr.deadline_ticks < 1) p.fail(path + ".deadline_ticks", "must be >= 1");
      s.topology.functions.push_back(std::move(fr));
    }
    i = 0;
    std::map<std::string, int> explicit_states;
    for (const json& r : arr("replicas")) {
      std::string path = "$.topology.replicas[" + std::to_string(i++) + "]";
      p.check_keys(r, path, {"id", "function", "host", "initial_state", "nominal"});
      core::Replica rep;
      rep.id = p.req_string(r, path, "id");
      rep.function = p.req_string(r, path, "function");
      rep.host = p.req_string(r, path, "host");
      rep.nominal = p.nominal_map(r, path, kReplicaDefaults);
      rep.state = core::LifecycleState::Standby;
      if (r.contains("initial_state")) {
        auto st = r["initial_state"].is_string()
                      ? core::lifecycle_state_from_string(r["initial_state"].get<std::string>())
                      : std::nullopt;
        if (!st) p.fail(path + ".initial_state", "unknown lifecycle state");
        else if (*st != core::LifecycleState::Active &&
                 *st != core::LifecycleState::Standby)
          p.fail(path + ".initial_state", "initial state must be ACTIVE or STANDBY");
        else {
          rep.state = *st;
          explicit_states[rep.function]++;
        }
      }
      s.topology.replicas.push_back(std::move(rep));
    }
    // a function with no explicit states activates its first-listed replica
    for (const auto& f : s.topology.functions) {
      if (explicit_states.count(f.id)) continue;
      for (auto& r : s.topology.replicas)
        if (r.function == f.id) { r.state = core::LifecycleState::Active; break; }
    }
  }

  // probes
  std::set<std::string> probe_ids;
  if (doc.contains("probes")) {
    if (!doc["probes"].is_array()) p.fail("$.probes", "expected an array");
    else {
      int i = 0;
      for (const json& pr : doc["probes"]) {
        std::string path = "$.probes[" + std::to_string(i++) + "]";
        p.check_keys(pr, path, {"id", "box", "target", "noise_half_width", "corruption"});
        probes::Probe probe;
        probe.id = p.req_string(pr, path, "id");
        if (!probe_ids.insert(probe.id).second)
          p.fail(path + ".id", "duplicate probe id: " + probe.id);
        std::string box = p.req_string(pr, path, "box");
        if (auto b = probes::box_from_string(box)) probe.box = *b;
        else p.fail(path + ".box", "unknown box type: " + box);
        probe.target = p.req_string(pr, path, "target");
        probe.noise_half_width = p.num(pr, path, "noise_half_width", 0.0);
        if (probe.noise_half_width < 0) p.fail(path + ".noise_half_width", "must be >= 0");
        if (pr.contains("corruption")) {
          const json& c = pr["corruption"];
          std::string cpath = path + ".corruption";
          p.check_keys(c, cpath, {"kind", "metric", "value", "onset"});
          probes::ProbeCorruption cor;
          std::string kind = p.req_string(c, cpath, "kind");
          if (auto k = probes::corruption_from_string(kind)) cor.kind = *k;
          else p.fail(cpath + ".kind", "unknown corruption kind: " + kind);
          if (c.contains("metric")) {
            auto m = c["metric"].is_string()
                         ? metric_from_string(c["metric"].get<std::string>())
                         : std::nullopt;
            if (!m) p.fail(cpath + ".metric", "unknown metric");
            else cor.metric = *m;
          } else if (cor.kind != probes::CorruptionKind::NoiseAmplify) {
            p.fail(cpath, "missing key: metric");
          }
          cor.value = p.num(c, cpath, "value", 0.0, true);
          cor.onset = p.integer(c, cpath, "onset", 0, true);
          if (cor.onset < 0) p.fail(cpath + ".onset", "must be >= 0");
          probe.corruption = cor;
        }
        s.probes.push_back(std::move(probe));
      }
    }
  }

  // detector
  if (doc.contains("detector")) {
    const json& d = doc["detector"];
    p.check_keys(d, "$.detector",
                 {"window_ticks", "persistence_windows", "tau", "pair_tolerance", "rules"});
    s.detector.window_ticks = p.integer(d, "$.detector", "window_ticks", 20);
    s.detector.persistence_windows =
        static_cast<int>(p.integer(d, "$.detector", "persistence_windows", 3));
    s.detector.tau = p.num(d, "$.detector", "tau", 3.5);
    s.detector.pair_tolerance = p.num(d, "$.detector", "pair_tolerance", 0.05);
    if (s.detector.window_ticks < 1) p.fail("$.detector.window_ticks", "must be >= 1");
    if (s.detector.persistence_windows < 2)
      p.fail("$.detector.persistence_windows",
             "must be >= 2 (single-window spikes must never be chronic)");
    if (s.detector.tau <= 0) p.fail("$.detector.tau", "must be > 0");
    if (s.detector.pair_tolerance < 0) p.fail("$.detector.pair_tolerance", "must be >= 0");
    if (d.contains("rules")) {
      if (!d["rules"].is_array()) p.fail("$.detector.rules", "expected an array");
      else {
        int i = 0;
        for (const json& r : d["rules"]) {
          std::string path = "$.detector.rules[" + std::to_string(i++) + "]";
          p.check_keys(r, path, {"metric", "comparator", "threshold"});
          integrity::ThresholdRule rule;
          std::string m = p.req_string(r, path, "metric");
          if (auto mm = metric_from_string(m)) rule.metric = *mm;
          else p.fail(path + ".metric", "unknown metric: " + m);
          std::string cmp = p.req_string(r, path, "comparator");
          if (cmp == ">" || cmp == "<") rule.comparator = cmp[0];
          else p.fail(path + ".comparator", "must be '>' or '<'");
          rule.threshold = p.num(r, path, "threshold", 0.0, true);
          if (rule.threshold == 0.0) p.fail(path + ".threshold", "must be nonzero");
          s.detector.rules.push_back(rule);
        }
      }
    }
  }

  // policy
  if (doc.contains("policy")) {
    const json& pol = doc["policy"];
    p.check_keys(pol, "$.policy", {"efficiency_margin", "margin_rounds", "floors"});
    s.policy.margin = p.num(pol, "$.policy", "efficiency_margin", 0.1);
    s.policy.rounds = static_cast<int>(p.integer(pol, "$.policy", "margin_rounds", 3));
    if (s.policy.margin < 0 || s.policy.margin > 1)
      p.fail("$.policy.efficiency_margin", "must be in [0,1]");
    if (s.policy.rounds < 1) p.fail("$.policy.margin_rounds", "must be >= 1");
    if (pol.contains("floors")) {
      if (!pol["floors"].is_object()) p.fail("$.policy.floors", "expected an object");
      else {
        for (auto it = pol["floors"].begin(); it != pol["floors"].end(); ++it) {
          if (!it.value().is_number()) {
            p.fail("$.policy.floors." + it.key(), "expected a number");
            continue;
          }
          double f = it.value().get<double>();
          if (f < 0 || f > 1) p.fail("$.policy.floors." + it.key(), "must be in [0,1]");
          if (!s.topology.find_function(it.key()))
            p.fail("$.policy.floors." + it.key(), "unknown function id");
          s.demand.efficiency_floor[it.key()] = f;
        }
      }
    }
  }

  // swap / heal / hardware_blacklist
  if (doc.contains("swap")) {
    const json& sw = doc["swap"];
    p.check_keys(sw, "$.swap", {"latency_ticks", "warm_handover"});
    s.swap.latency_ticks = p.integer(sw, "$.swap", "latency_ticks", 5);
    if (s.swap.latency_ticks < 0) p.fail("$.swap.latency_ticks", "must be >= 0");
    if (sw.contains("warm_handover")) {
      if (sw["warm_handover"].is_boolean()) s.swap.warm_handover = sw["warm_handover"];
      else p.fail("$.swap.warm_handover", "expected a boolean");
    }
  }
  if (doc.contains("heal")) {
    const json& h = doc["heal"];
    p.check_keys(h, "$.heal",
                 {"reboot_ticks", "reconfigure_ticks", "test_ticks", "max_heal_attempts"});
    s.heal.reboot_ticks = p.integer(h, "$.heal", "reboot_ticks", 200);
    s.heal.reconfigure_ticks = p.integer(h, "$.heal", "reconfigure_ticks", 50);
    s.heal.test_ticks = p.integer(h, "$.heal", "test_ticks", 50);
    s.heal.max_heal_attempts =
        static_cast<int>(p.integer(h, "$.heal", "max_heal_attempts", 3));
    if (s.heal.reboot_ticks < 1 || s.heal.reconfigure_ticks < 1 || s.heal.test_ticks < 1)
      p.fail("$.heal", "phase durations must be >= 1");
    if (s.heal.max_heal_attempts < 1) p.fail("$.heal.max_heal_attempts", "must be >= 1");
  }
  if (doc.contains("hardware_blacklist")) {
    const json& hb = doc["hardware_blacklist"];
    p.check_keys(hb, "$.hardware_blacklist", {"replica_threshold", "window_ticks"});
    s.hardware_blacklist.replica_threshold =
        static_cast<int>(p.integer(hb, "$.hardware_blacklist", "replica_threshold", 2));
    s.hardware_blacklist.window_ticks =
        p.integer(hb, "$.hardware_blacklist", "window_ticks", 500);
    if (s.hardware_blacklist.replica_threshold < 2)
      p.fail("$.hardware_blacklist.replica_threshold", "must be >= 2");
    if (s.hardware_blacklist.window_ticks < 1)
      p.fail("$.hardware_blacklist.window_ticks", "must be >= 1");
  }
  if (doc.contains("glass_substitution_fraction")) {
    s.glass_substitution_fraction =
        p.num(doc, "$", "glass_substitution_fraction", 0.5);
    if (s.glass_substitution_fraction < 0 || s.glass_substitution_fraction > 1)
      p.fail("$.glass_substitution_fraction", "must be in [0,1]");
  }

  // faults
  if (doc.contains("faults")) {
    if (!doc["faults"].is_array()) p.fail("$.faults", "expected an array");
    else {
      int i = 0;
      for (const json& f : doc["faults"]) {
        std::string path = "$.faults[" + std::to_string(i++) + "]";
        p.check_keys(f, path, {"target", "targets", "class", "onset", "magnitude", "duration"});
        FaultSpec fs;
        std::string klass = p.req_string(f, path, "class");
        if (auto c = fault_class_from_string(klass)) fs.klass = *c;
        else p.fail(path + ".class", "unknown fault class: " + klass);
        if (f.contains("targets")) {
          if (!f["targets"].is_array()) p.fail(path + ".targets", "expected an array");
          else
            for (const json& t : f["targets"])
              if (t.is_string()) fs.targets.push_back(t.get<std::string>());
              else p.fail(path + ".targets", "expected strings");
          if (!fs.targets.empty()) fs.target = fs.targets.front();
        }
        if (f.contains("target")) fs.target = p.req_string(f, path, "target");
        if (fs.target.empty()) p.fail(path, "missing key: target (or targets)");
        fs.onset = p.integer(f, path, "onset", 0, true);
        fs.magnitude = p.num(f, path, "magnitude", 0.0, true);
        if (f.contains("duration")) {
          if (f["duration"].is_null()) fs.duration = std::nullopt;
          else {
            Tick d = p.integer(f, path, "duration", 0);
            if (d < 1) p.fail(path + ".duration", "must be >= 1 (or null for permanent)");
            fs.duration = d;
          }
        }
        if (fs.onset < 0) p.fail(path + ".onset", "must be >= 0");
        if (fs.onset >= s.ticks) p.fail(path + ".onset", "beyond run ticks");
        switch (fs.klass) {
          case FaultClass::ErrorBurst:
          case FaultClass::GremlinBurst:
          case FaultClass::ThroughputDroop:
            if (fs.magnitude < 0 || fs.magnitude > 1)
              p.fail(path + ".magnitude", "must be in [0,1] for this class");
            break;
          default:
            if (fs.magnitude < 0) p.fail(path + ".magnitude", "must be >= 0");
        }
        if (fs.klass == FaultClass::LatencyDrift && !fs.duration)
          p.fail(path, "LATENCY_DRIFT requires a duration");
        if (fs.klass == FaultClass::PermanentCrash && fs.duration)
          p.fail(path, "PERMANENT_CRASH is permanent; duration must be absent");
        if (fs.klass == FaultClass::GremlinBurst) {
          if (fs.targets.size() < 2)
            p.fail(path, "GREMLIN_BURST requires >= 2 colocated targets");
        } else if (fs.targets.size() > 1) {
          p.fail(path, "only GREMLIN_BURST takes multiple targets");
        }
        if (fs.klass == FaultClass::DeadlineCreep &&
            !s.topology.find_replica(fs.target))
          p.fail(path + ".target", "DEADLINE_CREEP targets a replica");
        s.faults.push_back(std::move(fs));
      }
    }
  }

  // cross-reference checks
  auto component_exists = [&](const std::string& id) {
    return s.topology.find_replica(id) || s.topology.find_vm(id) ||
           s.topology.find_hardware(id);
  };
  for (size_t i = 0; i < s.probes.size(); ++i)
    if (!component_exists(s.probes[i].target))
      p.fail("$.probes[" + std::to_string(i) + "].target",
             "unknown component: " + s.probes[i].target);
  for (size_t i = 0; i < s.faults.size(); ++i) {
    const FaultSpec& fs = s.faults[i];
    std::string path = "$.faults[" + std::to_string(i) + "]";
    for (const auto& t : fs.all_targets())
      if (!component_exists(t)) p.fail(path, "unknown component: " + t);
    if (fs.klass == FaultClass::GremlinBurst && fs.targets.size() >= 2) {
      std::set<std::string> hw_ids;
      for (const auto& t : fs.targets) {
        const core::Replica* r = s.topology.find_replica(t);
        const core::HardwarePlatform* hw =
            r ? s.topology.hardware_of(*r)
              : (s.topology.find_vm(t)
                     ? s.topology.find_hardware(s.topology.find_vm(t)->hardware)
                     : s.topology.find_hardware(t));
        hw_ids.insert(hw ? hw->id : "?" + t);
      }
      if (hw_ids.size() != 1)
        p.fail(path, "GREMLIN_BURST targets must be colocated on one hardware platform");
    }
  }

  for (const auto& v : core::validate_topology(s.topology))
    p.fail("$.topology", v.rule + " (" + v.entity + "): " + v.message);

  // exactly one initially ACTIVE replica per function
  for (const auto& f : s.topology.functions) {
    int active = 0;
    for (const auto& r : s.topology.replicas)
      if (r.function == f.id && r.state == core::LifecycleState::Active) ++active;
    if (active != 1)
      p.fail("$.topology", "function " + f.id + " must start with exactly one ACTIVE replica");
  }

  if (!p.issues.empty()) throw ParseError(std::move(p.issues));
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError({{"$", std::string("not valid JSON: ") + e.what()}});
  }
  return parse_scenario(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError({{"$", "cannot open scenario file: " + path}});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["run"] = {{"ticks", s.ticks}, {"seed", s.seed}};
  json topo;
  auto nominal_json = [](const MetricMap& m) {
    json n = json::object();
    for (const auto& [k, v] : m) n[to_string(k)] = v;
    return n;
  };
  topo["hardware_platforms"] = json::array();
  for (const auto& h : s.topology.hardware_platforms)
    topo["hardware_platforms"].push_back({{"id", h.id}, {"nominal", nominal_json(h.nominal)}});
  topo["vm_platforms"] = json::array();
  for (const auto& v : s.topology.vm_platforms)
    topo["vm_platforms"].push_back(
        {{"id", v.id}, {"hardware", v.hardware}, {"nominal", nominal_json(v.nominal)}});
  topo["functions"] = json::array();
  for (const auto& f : s.topology.functions)
    topo["functions"].push_back(
        {{"id", f.id}, {"name", f.name}, {"deadline_ticks", f.deadline_ticks}});
  topo["replicas"] = json::array();
  for (const auto& r : s.topology.replicas)
    topo["replicas"].push_back({{"id", r.id},
                                {"function", r.function},
                                {"host", r.host},
                                {"initial_state", core::to_string(r.state)},
                                {"nominal", nominal_json(r.nominal)}});
  doc["topology"] = topo;
  doc["probes"] = json::array();
  for (const auto& pr : s.probes) {
    json j = {{"id", pr.id},
              {"box", probes::to_string(pr.box)},
              {"target", pr.target},
              {"noise_half_width", pr.noise_half_width}};
    if (pr.corruption)
      j["corruption"] = {{"kind", probes::to_string(pr.corruption->kind)},
                         {"metric", to_string(pr.corruption->metric)},
                         {"value", pr.corruption->value},
                         {"onset", pr.corruption->onset}};
    doc["probes"].push_back(j);
  }
  json rules = json::array();
  for (const auto& r : s.detector.rules)
    rules.push_back({{"metric", to_string(r.metric)},
                     {"comparator", std::string(1, r.comparator)},
                     {"threshold", r.threshold}});
  doc["detector"] = {{"window_ticks", s.detector.window_ticks},
                     {"persistence_windows", s.detector.persistence_windows},
                     {"tau", s.detector.tau},
                     {"pair_tolerance", s.detector.pair_tolerance},
                     {"rules", rules}};
  json floors = json::object();
  for (const auto& [f, v] : s.demand.efficiency_floor) floors[f] = v;
  doc["policy"] = {{"efficiency_margin", s.policy.margin},
                   {"margin_rounds", s.policy.rounds},
                   {"floors", floors}};
  doc["swap"] = {{"latency_ticks", s.swap.latency_ticks},
                 {"warm_handover", s.swap.warm_handover}};
  doc["heal"] = {{"reboot_ticks", s.heal.reboot_ticks},
                 {"reconfigure_ticks", s.heal.reconfigure_ticks},
                 {"test_ticks", s.heal.test_ticks},
                 {"max_heal_attempts", s.heal.max_heal_attempts}};
  doc["hardware_blacklist"] = {{"replica_threshold", s.hardware_blacklist.replica_threshold},
                               {"window_ticks", s.hardware_blacklist.window_ticks}};
  doc["glass_substitution_fraction"] = s.glass_substitution_fraction;
  doc["faults"] = json::array();
  for (const auto& f : s.faults) {
    json j = {{"class", to_string(f.klass)},
              {"onset", f.onset},
              {"magnitude", f.magnitude}};
    if (f.targets.empty()) j["target"] = f.target;
    else j["targets"] = f.targets;
    if (f.duration) j["duration"] = *f.duration;
    else j["duration"] = nullptr;
    doc["faults"].push_back(j);
  }
  return doc;
}

}  // namespace hotswap::sim
