// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hotswap/engine.hpp"

namespace fs = std::filesystem;
using namespace hotswap;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitProtocolViolation = 3;

bool debug_logging() {
  const char* lvl = std::getenv("HOTSWAP_LOG_LEVEL");
  return lvl && std::string(lvl) == "debug";
}

void debug(const std::string& msg) {
  if (debug_logging()) std::cerr << "[hotswap] " << msg << "\n";
}

int cmd_validate(const std::string& path) {
  try {
    sim::load_scenario_file(path);
  } catch (const sim::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            std::optional<Tick> ticks, const std::string& out_dir,
            const std::string& telemetry_path) {
  sim::Scenario scenario;
  try {
    scenario = sim::load_scenario_file(path);
  } catch (const sim::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  if (seed) scenario.seed = *seed;
  if (ticks) {
    if (*ticks < 1) {
      std::cerr << "--ticks must be >= 1\n";
      return kExitValidation;
    }
    scenario.ticks = *ticks;
  }
  debug("scenario " + (scenario.name.empty() ? path : scenario.name) + " loaded, " +
        std::to_string(scenario.ticks) + " ticks, seed " + std::to_string(scenario.seed));

  sim::Engine engine(scenario);
  std::ofstream telemetry;
  if (!telemetry_path.empty()) {
    telemetry.open(telemetry_path);
    if (!telemetry) {
      std::cerr << "cannot open telemetry output: " << telemetry_path << "\n";
      return 1;
    }
    engine.set_telemetry_sink([&telemetry](const probes::TelemetryRecord& rec) {
      nlohmann::json metrics = nlohmann::json::object();
      for (const auto& [m, v] : rec.metrics) metrics[to_string(m)] = v;
      telemetry << nlohmann::json{{"tick", rec.tick},
                                  {"probe", rec.probe},
                                  {"target", rec.target},
                                  {"metrics", metrics}}
                       .dump()
                << "\n";
    });
  }

  auto result = engine.run();

  fs::create_directories(out_dir);
  {
    std::ofstream ev(fs::path(out_dir) / "events.jsonl", std::ios::binary);
    ev << sim::serialize_event_log(result.log);
  }
  {
    std::ofstream mj(fs::path(out_dir) / "metrics.json", std::ios::binary);
    mj << result.metrics.to_json().dump(2) << "\n";
  }
  {
    std::ofstream sm(fs::path(out_dir) / "summary.txt", std::ios::binary);
    sm << sim::render_summary(result.metrics, scenario);
    if (result.aborted) sm << "RUN ABORTED: " << result.abort_reason << "\n";
  }

  if (result.aborted) {
    std::cerr << "protocol violation: " << result.abort_reason
              << " (partial log preserved)\n";
    return kExitProtocolViolation;
  }
  debug("run complete, " + std::to_string(result.log.size()) + " events");
  return 0;
}

int cmd_report(const std::string& log_path, const std::string& scenario_path) {
  sim::Scenario scenario;
  try {
    scenario = sim::load_scenario_file(scenario_path);
  } catch (const sim::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  }
  std::ifstream in(log_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open log: " << log_path << "\n";
    return kExitValidation;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<sim::SimEvent> log;
  try {
    log = sim::parse_event_log(ss.str());
  } catch (const std::exception& e) {
    std::cerr << "malformed event log: " << e.what() << "\n";
    return kExitValidation;
  }
  auto report = sim::compute_metrics(log, scenario);
  std::cout << report.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hotswap-sim: deterministic hot-swap healing protocol simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", log_path, telemetry_path;
  std::optional<std::uint64_t> seed;
  std::optional<Tick> ticks;

  auto* validate = app.add_subcommand("validate", "validate a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario JSON path")->required();

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("--scenario", scenario_path, "scenario JSON path")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--ticks", ticks, "override the run length");
  run->add_option("--out", out_dir, "output directory (events.jsonl, metrics.json, summary.txt)");
  run->add_option("--telemetry", telemetry_path, "also export telemetry as JSONL");

  auto* report = app.add_subcommand("report", "recompute metrics from an event log");
  report->add_option("--log", log_path, "events.jsonl path")->required();
  report->add_option("--scenario", scenario_path, "scenario JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(scenario_path);
  if (run->parsed()) return cmd_run(scenario_path, seed, ticks, out_dir, telemetry_path);
  if (report->parsed()) return cmd_report(log_path, scenario_path);
  return 1;
}
