#include "drivesim/events.hpp"

namespace drivesim {

nlohmann::json to_json(const SimEvent& e) {
  nlohmann::json j = e.detail.is_object() ? e.detail : nlohmann::json::object();
  j["tick"] = e.tick;
  j["type"] = e.type;
  j["ids"] = e.ids;
  return j;
}

}  // namespace drivesim
