// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <doctest.h>

#include "hotswap/confidence.hpp"

using namespace hotswap;
using namespace hotswap::confidence;
using core::Replica;
using core::Topology;
using S = core::LifecycleState;
using integrity::Health;

namespace {

Topology topo3() {
  Topology t;
  t.hardware_platforms = {{"hw1", false, {}}, {"hw2", false, {}}};
  t.vm_platforms = {{"vmp1", "hw1", false, {}},
                    {"vmp2", "hw2", false, {}},
                    {"vmp3", "hw2", false, {}}};
  t.functions = {{"f1", "f1", 100}};
  t.replicas = {Replica{"r1", "f1", "vmp1", S::Active, 0.9, 0, true, {}},
                Replica{"r2", "f1", "vmp2", S::Standby, 0.8, 0, true, {}},
                Replica{"r3", "f1", "vmp3", S::Standby, 0.7, 0, true, {}}};
  return t;
}

}  // namespace

TEST_CASE("hysteresis streak counting") {
  CHECK(update_hysteresis(0, true) == 1);
  CHECK(update_hysteresis(2, true) == 3);
  CHECK(update_hysteresis(2, false) == 0);
}

TEST_CASE("faulty active triggers an immediate fault swap to best standby") {
  auto t = topo3();
  DecisionInputs in;
  in.now = 59;
  in.swap_latency = 5;
  in.health = {{"r1", Health::Faulty}};
  in.efficiency = {{"r1", 0.9}, {"r2", 0.8}, {"r3", 0.85}};
  std::map<std::string, int> streaks;
  auto out = decide(in, t, {}, {}, streaks);
  REQUIRE(out.commands.size() == 1);
  const auto& c = out.commands[0];
  CHECK(c.reason == SwapReason::Fault);
  CHECK(c.demote == "r1");
  CHECK(c.promote == "r3");  // highest efficiency standby
  CHECK(c.tick == 59);
  CHECK(c.expected_latency == 5);
}

TEST_CASE("DEGRADED alone never triggers a swap") {
  auto t = topo3();
  DecisionInputs in;
  in.health = {{"r1", Health::Degraded}};
  in.efficiency = {{"r1", 0.9}, {"r2", 0.8}, {"r3", 0.7}};
  std::map<std::string, int> streaks;
  CHECK(decide(in, t, {}, {}, streaks).commands.empty());
}

TEST_CASE("efficiency swap requires margin held for p consecutive rounds") {
  auto t = topo3();
  t.replicas[0].efficiency_score = 0.5;
  DecisionInputs in;
  in.health = {{"r1", Health::Healthy}};
  in.efficiency = {{"r1", 0.5}, {"r2", 0.8}, {"r3", 0.7}};
  HysteresisPolicy policy{0.1, 3};
  std::map<std::string, int> streaks;
  CHECK(decide(in, t, {}, policy, streaks).commands.empty());  // round 1
  CHECK(decide(in, t, {}, policy, streaks).commands.empty());  // round 2
  auto out = decide(in, t, {}, policy, streaks);               // round 3
  REQUIRE(out.commands.size() == 1);
  CHECK(out.commands[0].reason == SwapReason::Efficiency);
  CHECK(out.commands[0].demote == "r1");
  CHECK(out.commands[0].promote == "r2");
}

TEST_CASE("sub-margin advantage never swaps, no flapping") {
  auto t = topo3();
  DecisionInputs in;
  in.health = {{"r1", Health::Healthy}};
  in.efficiency = {{"r1", 0.75}, {"r2", 0.80}, {"r3", 0.7}};  // gap 0.05 < 0.1
  HysteresisPolicy policy{0.1, 3};
  std::map<std::string, int> streaks;
  for (int round = 0; round < 50; ++round)
    CHECK(decide(in, t, {}, policy, streaks).commands.empty());
}

TEST_CASE("a margin break resets the streak") {
  auto t = topo3();
  DecisionInputs in;
  in.health = {{"r1", Health::Healthy}};
  HysteresisPolicy policy{0.1, 3};
  std::map<std::string, int> streaks;
  in.efficiency = {{"r1", 0.5}, {"r2", 0.8}, {"r3", 0.52}};
  decide(in, t, {}, policy, streaks);
  decide(in, t, {}, policy, streaks);
  in.efficiency["r2"] = 0.55;  // margin lost on round 3
  CHECK(decide(in, t, {}, policy, streaks).commands.empty());
  in.efficiency["r2"] = 0.8;
  CHECK(decide(in, t, {}, policy, streaks).commands.empty());  // streak restarted
  CHECK(decide(in, t, {}, policy, streaks).commands.empty());
  CHECK(decide(in, t, {}, policy, streaks).commands.size() == 1);
}

TEST_CASE("no certified standby: degraded mode, no command") {
  auto t = topo3();
  t.replicas[1].certified = false;
  t.replicas[2].state = S::Blacklisted;
  DecisionInputs in;
  in.health = {{"r1", Health::Faulty}};
  std::map<std::string, int> streaks;
  auto out = decide(in, t, {}, {}, streaks);
  CHECK(out.commands.empty());
  REQUIRE(out.degraded_functions.size() == 1);
  CHECK(out.degraded_functions[0] == "f1");
}

TEST_CASE("blacklisted host disqualifies the standby") {
  auto t = topo3();
  t.hardware_platforms[1].blacklisted = true;  // hw2 hosts vmp2+vmp3
  CHECK(!promotable(t, t.replicas[1]));
  CHECK(!promotable(t, t.replicas[2]));
  DecisionInputs in;
  in.health = {{"r1", Health::Faulty}};
  std::map<std::string, int> streaks;
  auto out = decide(in, t, {}, {}, streaks);
  CHECK(out.commands.empty());
  CHECK(out.degraded_functions == std::vector<std::string>{"f1"});
}

TEST_CASE("active on a blacklisted platform is swapped away") {
  auto t = topo3();
  t.hardware_platforms[0].blacklisted = true;  // hosts r1 via vmp1
  DecisionInputs in;
  in.health = {{"r1", Health::Healthy}};
  std::map<std::string, int> streaks;
  auto out = decide(in, t, {}, {}, streaks);
  REQUIRE(out.commands.size() == 1);
  CHECK(out.commands[0].reason == SwapReason::Fault);
  CHECK(out.commands[0].demote == "r1");
}

TEST_CASE("pending promotion suppresses further commands for the function") {
  auto t = topo3();
  DecisionInputs in;
  in.health = {{"r1", Health::Faulty}};
  in.pending_promotion = {{"f1", true}};
  std::map<std::string, int> streaks;
  CHECK(decide(in, t, {}, {}, streaks).commands.empty());
}

TEST_CASE("uncovered function gets a recovery promotion with empty demote") {
  auto t = topo3();
  t.replicas[0].state = S::Blacklisted;
  DecisionInputs in;
  in.now = 100;
  std::map<std::string, int> streaks;
  auto out = decide(in, t, {}, {}, streaks);
  REQUIRE(out.commands.size() == 1);
  CHECK(out.commands[0].demote.empty());
  CHECK(out.commands[0].promote == "r2");  // higher score than r3
}

TEST_CASE("supply/demand mediation assigns greedily by efficiency then id") {
  auto t = topo3();
  auto a = mediate_supply_demand(t, {"r1", "r2", "r3"}, {});
  CHECK(a.by_function.at("f1") == "r1");
  CHECK(a.uncovered.empty());

  t.replicas[0].efficiency_score = 0.8;  // tie with r2 -> smaller id wins
  auto b = mediate_supply_demand(t, {"r1", "r2", "r3"}, {});
  CHECK(b.by_function.at("f1") == "r1");

  auto c = mediate_supply_demand(t, {}, {});
  CHECK(c.uncovered == std::vector<std::string>{"f1"});
}

TEST_CASE("demand floor marks functions whose best supply is insufficient") {
  auto t = topo3();
  DemandTable demand;
  demand.efficiency_floor["f1"] = 0.95;
  auto a = mediate_supply_demand(t, {"r1", "r2", "r3"}, demand);
  CHECK(a.uncovered == std::vector<std::string>{"f1"});
}
