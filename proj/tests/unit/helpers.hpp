// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <json.hpp>

#include "hotswap/scenario.hpp"

namespace hotswap::testing {

// Standard 1-function / 3-replica scenario document; tests patch it as needed.
inline nlohmann::json basic_scenario_doc(Tick ticks = 2000, std::uint64_t seed = 1) {
  return nlohmann::json{
      {"name", "test"},
      {"run", {{"ticks", ticks}, {"seed", seed}}},
      {"topology",
       {{"hardware_platforms", {{{"id", "hw1"}}, {{"id", "hw2"}}}},
        {"vm_platforms",
         {{{"id", "vmp1"}, {"hardware", "hw1"}},
          {{"id", "vmp2"}, {"hardware", "hw2"}},
          {{"id", "vmp3"}, {"hardware", "hw2"}}}},
        {"functions", {{{"id", "f1"}, {"deadline_ticks", 100}}}},
        {"replicas",
         {{{"id", "r1"}, {"function", "f1"}, {"host", "vmp1"}, {"initial_state", "ACTIVE"}},
          {{"id", "r2"}, {"function", "f1"}, {"host", "vmp2"}, {"initial_state", "STANDBY"}},
          {{"id", "r3"}, {"function", "f1"}, {"host", "vmp3"}, {"initial_state", "STANDBY"}}}}}},
      {"probes",
       {{{"id", "w_r1"}, {"box", "WHITE"}, {"target", "r1"}},
        {{"id", "w_r2"}, {"box", "WHITE"}, {"target", "r2"}},
        {{"id", "w_r3"}, {"box", "WHITE"}, {"target", "r3"}}}},
      {"detector",
       {{"window_ticks", 20},
        {"persistence_windows", 3},
        {"tau", 3.5},
        {"pair_tolerance", 0.05},
        {"rules",
         {{{"metric", "error_rate"}, {"comparator", ">"}, {"threshold", 0.5}}}}}},
      {"policy", {{"efficiency_margin", 0.1}, {"margin_rounds", 3}}},
      {"swap", {{"latency_ticks", 5}, {"warm_handover", true}}},
      {"heal",
       {{"reboot_ticks", 200},
        {"reconfigure_ticks", 50},
        {"test_ticks", 50},
        {"max_heal_attempts", 3}}},
      {"faults", nlohmann::json::array()}};
}

inline sim::Scenario basic_scenario(Tick ticks = 2000, std::uint64_t seed = 1) {
  return sim::parse_scenario(basic_scenario_doc(ticks, seed));
}

}  // namespace hotswap::testing
