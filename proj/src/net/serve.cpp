#include "drivesim/net/serve.hpp"

#include <cstdio>
#include <memory>

#include "drivesim/log.hpp"

namespace drivesim::net {

std::vector<std::string> run_loop(Simulation& sim, Broker* broker, const LoopOptions& options,
                                  const std::atomic<bool>* stop) {
  std::vector<std::string> datasets;
  std::unique_ptr<RecordingSession> recording;
  int takes = 0;

  auto start_recording = [&](const std::filesystem::path& dir) {
    try {
      recording = std::make_unique<RecordingSession>(sim, dir);
      datasets.push_back(dir.string());
      log::info("recording started", {{"dir", dir.string()}, {"tick", sim.tick()}});
      if (broker) broker->publish_event({sim.tick(), "recording_started", {}, {{"dir", dir.string()}}}, sim.sim_time());
    } catch (const std::exception& e) {
      log::error("recording failed to start", {{"error", e.what()}});
      if (broker) broker->publish_event({sim.tick(), "recorder_error", {}, {{"message", e.what()}}}, sim.sim_time());
    }
  };
  auto stop_recording = [&] {
    if (!recording) return;
    recording->stop();
    const auto err = recording->error();
    log::info("recording stopped", {{"dir", recording->directory().string()}, {"tick", sim.tick()}});
    if (broker) {
      broker->publish_event({sim.tick(), err ? "recorder_error" : "recording_stopped", {},
                             {{"dir", recording->directory().string()}, {"message", err.value_or("")}}},
                            sim.sim_time());
    }
    recording.reset();
  };

  if (options.record_dir && options.record_from_start) start_recording(*options.record_dir);
  if (broker) broker->set_recorder_available(options.record_dir.has_value());

  Pacer pacer(options.mode, sim.dt());
  const std::uint64_t first = sim.tick();
  std::size_t script_pos = 0;
  while (options.ticks == 0 || sim.tick() < first + options.ticks) {
    if (stop && stop->load()) break;
    pacer.wait_for(sim.tick() - first);

    if (broker) {
      if (const auto req = broker->take_recorder_request()) {
        if (req->start && !recording && options.record_dir) {
          char name[32];
          std::snprintf(name, sizeof name, "take-%04d", ++takes);
          start_recording(*options.record_dir / name);
        } else if (!req->start) {
          stop_recording();
        }
      }
    }

    std::map<VehicleId, dyn::ControlInput> latched;
    if (broker) latched = broker->latch(sim.tick());
    for (; script_pos < options.script.size() && options.script[script_pos].tick <= sim.tick(); ++script_pos) {
      if (options.script[script_pos].tick == sim.tick()) {
        latched[options.script[script_pos].vehicle] = options.script[script_pos].input;
      }
    }

    const TickOutput& out = sim.step(latched);
    if (recording) {
      recording->after_step(out);
      if (const auto err = recording->error()) {
        log::error("recording failed", {{"error", *err}});
        stop_recording();
      }
    }
    if (broker) broker->publish_tick(out, sim.scenario());
  }
  stop_recording();
  return datasets;
}

}  // namespace drivesim::net
