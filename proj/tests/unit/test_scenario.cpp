// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <doctest.h>

#include "helpers.hpp"
#include "hotswap/scenario.hpp"

using namespace hotswap;
using namespace hotswap::sim;
using hotswap::testing::basic_scenario_doc;

namespace {

bool fails_mentioning(nlohmann::json doc, const std::string& needle) {
  try {
    parse_scenario(doc);
    return false;
  } catch (const ParseError& e) {
    for (const auto& issue : e.issues)
      if (issue.message.find(needle) != std::string::npos ||
          issue.path.find(needle) != std::string::npos)
        return true;
    return false;
  }
}

}  // namespace

TEST_CASE("basic scenario parses and round-trips") {
  auto s = parse_scenario(basic_scenario_doc());
  CHECK(s.ticks == 2000);
  CHECK(s.seed == 1);
  CHECK(s.topology.replicas.size() == 3);
  CHECK(s.probes.size() == 3);
  CHECK(s.detector.window_ticks == 20);
  CHECK(s.policy.margin == doctest::Approx(0.1));
  CHECK(s.heal.max_heal_attempts == 3);

  // round-trip: serialize, reparse, serialize again, byte-identical
  auto j1 = scenario_to_json(s);
  auto s2 = parse_scenario(j1);
  CHECK(scenario_to_json(s2).dump() == j1.dump());
}

TEST_CASE("unknown keys are rejected everywhere") {
  auto doc = basic_scenario_doc();
  doc["mystery"] = 1;
  CHECK(fails_mentioning(doc, "mystery"));

  doc = basic_scenario_doc();
  doc["detector"]["typo_tau"] = 3.5;
  CHECK(fails_mentioning(doc, "typo_tau"));

  doc = basic_scenario_doc();
  doc["topology"]["replicas"][0]["hosts"] = "vmp1";
  CHECK(fails_mentioning(doc, "hosts"));
}

TEST_CASE("dangling references are rejected") {
  auto doc = basic_scenario_doc();
  doc["probes"][0]["target"] = "ghost";
  CHECK(fails_mentioning(doc, "ghost"));

  doc = basic_scenario_doc();
  doc["topology"]["replicas"][0]["host"] = "ghost";
  CHECK(fails_mentioning(doc, "ghost"));

  doc = basic_scenario_doc();
  doc["faults"] = {{{"class", "ERROR_BURST"},
                    {"target", "ghost"},
                    {"onset", 10},
                    {"magnitude", 0.9},
                    {"duration", 100}}};
  CHECK(fails_mentioning(doc, "ghost"));
}

TEST_CASE("exactly one initial ACTIVE per function is enforced") {
  auto doc = basic_scenario_doc();
  doc["topology"]["replicas"][1]["initial_state"] = "ACTIVE";
  CHECK_THROWS_AS(parse_scenario(doc), ParseError);
}

TEST_CASE("default initial states activate the first replica") {
  auto doc = basic_scenario_doc();
  for (auto& r : doc["topology"]["replicas"]) r.erase("initial_state");
  auto s = parse_scenario(doc);
  CHECK(s.topology.replicas[0].state == core::LifecycleState::Active);
  CHECK(s.topology.replicas[1].state == core::LifecycleState::Standby);
  CHECK(s.topology.replicas[2].state == core::LifecycleState::Standby);
}

TEST_CASE("persistence below 2 windows is rejected") {
  auto doc = basic_scenario_doc();
  doc["detector"]["persistence_windows"] = 1;
  CHECK_THROWS_AS(parse_scenario(doc), ParseError);
}

TEST_CASE("fault class constraints") {
  auto fault = [](nlohmann::json f) {
    auto doc = basic_scenario_doc();
    doc["faults"] = nlohmann::json::array({std::move(f)});
    return doc;
  };

  // PERMANENT_CRASH takes no duration
  CHECK_THROWS_AS(parse_scenario(fault({{"class", "PERMANENT_CRASH"},
                                        {"target", "r1"},
                                        {"onset", 10},
                                        {"magnitude", 1.0},
                                        {"duration", 100}})),
                  ParseError);
  CHECK_NOTHROW(parse_scenario(fault({{"class", "PERMANENT_CRASH"},
                                      {"target", "r1"},
                                      {"onset", 10},
                                      {"magnitude", 1.0}})));

  // LATENCY_DRIFT requires a duration to define the ramp
  CHECK_THROWS_AS(parse_scenario(fault({{"class", "LATENCY_DRIFT"},
                                        {"target", "r1"},
                                        {"onset", 10},
                                        {"magnitude", 50.0}})),
                  ParseError);

  // GREMLIN_BURST needs >= 2 targets colocated on one hardware platform;
  // r1 (hw1) and r2 (hw2) are not colocated
  CHECK_THROWS_AS(parse_scenario(fault({{"class", "GREMLIN_BURST"},
                                        {"targets", {"r1", "r2"}},
                                        {"onset", 10},
                                        {"magnitude", 0.9},
                                        {"duration", 40}})),
                  ParseError);
  // r2 and r3 share hw2 via vmp2/vmp3
  CHECK_NOTHROW(parse_scenario(fault({{"class", "GREMLIN_BURST"},
                                      {"targets", {"r2", "r3"}},
                                      {"onset", 10},
                                      {"magnitude", 0.9},
                                      {"duration", 40}})));
}

TEST_CASE("fault activity window is half-open") {
  FaultSpec f;
  f.onset = 100;
  f.duration = 50;
  CHECK(!f.active_at(99));
  CHECK(f.active_at(100));
  CHECK(f.active_at(149));
  CHECK(!f.active_at(150));

  FaultSpec perm;
  perm.onset = 100;
  CHECK(perm.active_at(1000000));
}

TEST_CASE("fault injection effects on ground truth") {
  probes::ComponentTruth base;
  base.metrics = {{MetricName::LatencyMs, 10.0},
                  {MetricName::ErrorRate, 0.0},
                  {MetricName::Throughput, 100.0},
                  {MetricName::CpuLoad, 0.3},
                  {MetricName::TemperatureProxy, 40.0}};

  SUBCASE("latency drift ramps linearly over the duration") {
    FaultSpec f{"r1", {}, FaultClass::LatencyDrift, 1000, 60.0, 4000};
    auto t = base;
    inject(f, t, 1000, 100);
    CHECK(t.metrics[MetricName::LatencyMs] == doctest::Approx(10.0));
    t = base;
    inject(f, t, 3000, 100);  // halfway
    CHECK(t.metrics[MetricName::LatencyMs] == doctest::Approx(40.0));
  }

  SUBCASE("error burst pins the error rate") {
    FaultSpec f{"r1", {}, FaultClass::ErrorBurst, 0, 0.9, 100};
    auto t = base;
    inject(f, t, 50, 100);
    CHECK(t.metrics[MetricName::ErrorRate] == doctest::Approx(0.9));
  }

  SUBCASE("throughput droop scales throughput down") {
    FaultSpec f{"r1", {}, FaultClass::ThroughputDroop, 0, 0.5, 100};
    auto t = base;
    inject(f, t, 50, 100);
    CHECK(t.metrics[MetricName::Throughput] == doctest::Approx(50.0));
  }

  SUBCASE("permanent crash zeroes throughput and saturates errors") {
    FaultSpec f{"r1", {}, FaultClass::PermanentCrash, 0, 1.0, std::nullopt};
    auto t = base;
    inject(f, t, 50, 100);
    CHECK(t.metrics[MetricName::Throughput] == 0.0);
    CHECK(t.metrics[MetricName::ErrorRate] == 1.0);
  }

  SUBCASE("deadline creep pushes latency past the deadline") {
    FaultSpec f{"r1", {}, FaultClass::DeadlineCreep, 0, 0.2, 100};
    auto t = base;
    inject(f, t, 50, 100);
    CHECK(t.metrics[MetricName::LatencyMs] == doctest::Approx(120.0));
  }
}

TEST_CASE("PERMANENT_CRASH is the only unhealable class") {
  CHECK(!fault_healable(FaultClass::PermanentCrash));
  for (FaultClass c : {FaultClass::LatencyDrift, FaultClass::ErrorBurst,
                       FaultClass::ThroughputDroop, FaultClass::GremlinBurst,
                       FaultClass::DeadlineCreep})
    CHECK(fault_healable(c));
}

TEST_CASE("parse errors are aggregated, not first-error-only") {
  auto doc = basic_scenario_doc();
  doc["probes"][0]["target"] = "ghost";
  doc["topology"]["replicas"][0]["host"] = "phantom";
  try {
    parse_scenario(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.issues.size() >= 2);
  }
}
