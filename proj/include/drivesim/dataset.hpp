#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "drivesim/camera.hpp"
#include "drivesim/dynamics.hpp"
#include "drivesim/observation.hpp"
#include "drivesim/scenario.hpp"

namespace drivesim {

inline constexpr const char* kDatasetFormat = "drivesim-dataset/1";

/// A change of an ego's applied control input, effective from `tick`.
struct CommandRecord {
  std::uint64_t tick = 0;
  VehicleId vehicle = 0;
  dyn::ControlInput input;

  bool operator==(const CommandRecord&) const = default;
};

nlohmann::json to_json(const CommandRecord& c);
CommandRecord command_from_json(const nlohmann::json& j);

struct DatasetSample {
  std::uint64_t tick = 0;
  double timestamp = 0.0;
  VehicleId vehicle = 0;
  dyn::ControlInput action;  // applied during this tick
  Observation observation;
  std::string observation_hash;
  /// The ego's rgb frames making up C, in config order.
  std::vector<std::shared_ptr<const CameraFrame>> frames;
};

/// Relative path of a frame file inside a dataset directory.
std::string frame_path(const std::string& camera_id, std::uint64_t tick);

nlohmann::json sample_line(const DatasetSample& s);

nlohmann::json sensor_config_json(const SensorConfig& c);

/// Writes one dataset directory: scenario.yaml, commands.jsonl,
/// samples.jsonl, frames/ and, on finalize, manifest.json. All I/O happens on
/// a writer thread fed by a bounded queue; producers block when it is full.
class DatasetRecorder {
 public:
  DatasetRecorder(std::filesystem::path out_dir, const Scenario& scenario, double dt, std::uint64_t start_tick,
                  std::size_t history_len = 1, std::size_t queue_capacity = 64);
  ~DatasetRecorder();
  DatasetRecorder(const DatasetRecorder&) = delete;
  DatasetRecorder& operator=(const DatasetRecorder&) = delete;

  void add_command(const CommandRecord& c);
  void add_frame(std::shared_ptr<const CameraFrame> frame, std::uint64_t tick);
  void add_sample(DatasetSample sample);

  /// Drains the queue and writes manifest.json. Idempotent.
  void finalize(std::uint64_t end_tick, const std::string& final_state_hash);

  /// First I/O error, if any. After an error further writes are dropped and
  /// already-written files stay valid.
  std::optional<std::string> error() const;

  const std::filesystem::path& directory() const { return dir_; }
  std::uint64_t sample_count() const { return samples_; }

 private:
  void enqueue(std::function<void()> job);
  void run();
  void fail(const std::string& what);

  std::filesystem::path dir_;
  nlohmann::json manifest_;
  std::uint64_t samples_ = 0;
  bool finalized_ = false;

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<std::function<void()>> queue_;
  bool stop_ = false;
  std::optional<std::string> error_;
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> commands_{nullptr, &std::fclose};
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> samples_file_{nullptr, &std::fclose};
  std::thread worker_;
};

struct DatasetManifest {
  nlohmann::json raw;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  double dt = 0.01;
  std::uint64_t start_tick = 0;
  std::uint64_t end_tick = 0;
  std::uint64_t sample_count = 0;
  std::size_t history_len = 1;
  std::string final_state_hash;
};

DatasetManifest read_manifest(const std::filesystem::path& dir);
std::vector<CommandRecord> read_commands(const std::filesystem::path& dir);
std::vector<nlohmann::json> read_samples(const std::filesystem::path& dir);

}  // namespace drivesim
