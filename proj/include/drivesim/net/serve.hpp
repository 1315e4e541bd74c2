#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "drivesim/net/broker.hpp"
#include "drivesim/simulation.hpp"

namespace drivesim::net {

struct LoopOptions {
  ClockMode mode = ClockMode::realtime;
  std::uint64_t ticks = 0;  // 0 runs until `stop` is set
  /// Dataset directory for recordings. When set the recorder is available to
  /// clients; with `record_from_start` it runs from tick 0.
  std::optional<std::filesystem::path> record_dir;
  bool record_from_start = false;
  /// Scripted commands replayed through the latch (tick, vehicle, input).
  std::vector<CommandRecord> script;
};

/// The serving loop: per tick, pace, handle recorder requests, latch, step,
/// record, publish. Returns the datasets written.
std::vector<std::string> run_loop(Simulation& sim, Broker* broker, const LoopOptions& options,
                                  const std::atomic<bool>* stop = nullptr);

}  // namespace drivesim::net
