// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "hotswap/event.hpp"

#include <sstream>

namespace hotswap::sim {

using nlohmann::json;

json SimEvent::to_json() const {
  // nlohmann orders keys alphabetically, which is our canonical form
  return json{{"kind", kind},
              {"payload", payload},
              {"priority", priority},
              {"seq", sequence},
              {"tick", tick}};
}

SimEvent SimEvent::from_json(const json& j) {
  SimEvent e;
  e.tick = j.at("tick").get<Tick>();
  e.priority = j.at("priority").get<int>();
  e.sequence = j.at("seq").get<std::uint64_t>();
  e.kind = j.at("kind").get<std::string>();
  e.payload = j.at("payload");
  return e;
}

std::string serialize_event_log(const std::vector<SimEvent>& log) {
  std::ostringstream os;
  for (const auto& e : log) os << e.to_json().dump() << "\n";
  return os.str();
}

std::vector<SimEvent> parse_event_log(const std::string& jsonl) {
  std::vector<SimEvent> out;
  std::istringstream is(jsonl);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(SimEvent::from_json(json::parse(line)));
  }
  return out;
}

}  // namespace hotswap::sim
