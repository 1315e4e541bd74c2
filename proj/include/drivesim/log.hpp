#pragma once

#include <string_view>

#include <json.hpp>

namespace drivesim::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold from DRIVESIM_LOG (error|warn|info|debug), default info.
Level threshold();
void set_threshold(Level level);

/// One JSON object per line on stderr: {"level", "msg", ...fields}.
void write(Level level, std::string_view message, const nlohmann::json& fields = nlohmann::json::object());

inline void error(std::string_view m, const nlohmann::json& f = nlohmann::json::object()) { write(Level::error, m, f); }
inline void warn(std::string_view m, const nlohmann::json& f = nlohmann::json::object()) { write(Level::warn, m, f); }
inline void info(std::string_view m, const nlohmann::json& f = nlohmann::json::object()) { write(Level::info, m, f); }
inline void debug(std::string_view m, const nlohmann::json& f = nlohmann::json::object()) { write(Level::debug, m, f); }

}  // namespace drivesim::log
