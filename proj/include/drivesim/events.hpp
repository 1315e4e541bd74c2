#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace drivesim {

/// One entry of the simulation event log, published on `/sim/events`.
struct SimEvent {
  std::uint64_t tick = 0;
  std::string type;
  std::vector<std::int64_t> ids;
  nlohmann::json detail = nlohmann::json::object();

  bool operator==(const SimEvent&) const = default;
};

/// {tick, type, ids, ...detail}
nlohmann::json to_json(const SimEvent& e);

}  // namespace drivesim
