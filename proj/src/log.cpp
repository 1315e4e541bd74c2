#include "drivesim/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace drivesim::log {

namespace {

Level from_env() {
  const char* env = std::getenv("DRIVESIM_LOG");
  if (!env) return Level::info;
  const std::string_view v(env);
  if (v == "error") return Level::error;
  if (v == "warn") return Level::warn;
  if (v == "debug") return Level::debug;
  return Level::info;
}

std::atomic<int>& level_ref() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

constexpr const char* kNames[] = {"error", "warn", "info", "debug"};

}  // namespace

Level threshold() { return static_cast<Level>(level_ref().load()); }
void set_threshold(Level level) { level_ref() = static_cast<int>(level); }

void write(Level level, std::string_view message, const nlohmann::json& fields) {
  if (static_cast<int>(level) > level_ref().load()) return;
  nlohmann::json line = fields.is_object() ? fields : nlohmann::json::object();
  line["level"] = kNames[static_cast<int>(level)];
  line["msg"] = std::string(message);
  const std::string text = line.dump() + "\n";
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::fwrite(text.data(), 1, text.size(), stderr);
}

}  // namespace drivesim::log
