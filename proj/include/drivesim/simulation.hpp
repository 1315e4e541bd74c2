#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "drivesim/camera.hpp"
#include "drivesim/dataset.hpp"
#include "drivesim/events.hpp"
#include "drivesim/observation.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/sensors.hpp"
#include "drivesim/traffic.hpp"

namespace drivesim {

struct SimOptions {
  double dt = 0.01;
  bool sensors = true;
  traffic::TrafficConfig traffic;
  double ego_capture_radius = 2.0;
  std::size_t history_len = 1;
};

struct EgoVehicle {
  VehicleSpec spec;
  dyn::VehicleState state;
  dyn::ControlInput input;  // held until the next latched command
  EgoRoute route;
};

using SensorData = std::variant<RadarScan, ImuSample, GnssFix, std::shared_ptr<const CameraFrame>>;

struct SensorOutput {
  std::size_t config_index = 0;
  SensorData data;
};

struct VehiclePose {
  VehicleId id = 0;
  geo::Pose2 pose;
  double speed = 0.0;
};

/// Everything one tick produced, stamped with sim_time = tick * dt.
struct TickOutput {
  std::uint64_t tick = 0;
  double sim_time = 0.0;
  std::vector<SensorOutput> sensors;
  std::vector<SimEvent> events;
  std::vector<DatasetSample> samples;  // only while sampling is on
  std::vector<VehiclePose> egos;
  std::vector<VehiclePose> traffic;
  std::vector<traffic::LightPhaseState> lights;
};

/// Fixed-timestep world. One call to `step` runs the phases in order:
/// latch commands, advance traffic against the previous snapshot, step egos,
/// collisions and respawn, light phases, due sensors, dataset samples, then
/// the tick counter advances. Publishing the outputs is the caller's job.
class Simulation {
 public:
  Simulation(Scenario scenario, SimOptions options = {});

  /// Runs one tick with the commands latched for it (latest per ego) and
  /// returns its outputs. Commands for unknown or non-ego vehicles are ignored.
  const TickOutput& step(const std::map<VehicleId, dyn::ControlInput>& latched = {});

  std::uint64_t tick() const { return tick_; }
  double dt() const { return options_.dt; }
  double sim_time() const { return static_cast<double>(tick_) * options_.dt; }
  const Scenario& scenario() const { return scenario_; }
  const SimOptions& options() const { return options_; }

  const std::vector<EgoVehicle>& egos() const { return egos_; }
  const EgoVehicle* find_ego(VehicleId id) const;
  const std::vector<traffic::TrafficAgent>& agents() const { return agents_; }
  const std::vector<traffic::LightPhaseState>& lights() const { return lights_; }

  /// Footprints of all active vehicles, egos first, each group in id order.
  std::vector<Footprint> footprints() const;

  const std::vector<SimEvent>& event_log() const { return event_log_; }
  const std::vector<CommandRecord>& command_log() const { return command_log_; }
  std::uint64_t collision_count() const { return collisions_; }

  /// SHA-256 over every dynamic quantity of the world.
  std::string state_hash() const;
  /// SHA-256 over the serialized event log.
  std::string event_log_hash() const;

  /// Observations are only built while sampling is on.
  void set_sampling(bool on) { sampling_ = on; }
  bool sampling() const { return sampling_; }

  /// Test hook: places an ego without touching its controls.
  void set_ego_state(VehicleId id, const dyn::VehicleState& state);
  /// Test hook: overwrites a traffic agent.
  void set_agent_state(VehicleId id, const dyn::VehicleState& state);

 private:
  EgoVehicle* ego(VehicleId id);
  void sample_sensors(const WorldView& view, TickOutput& out);
  void build_samples(TickOutput& out);

  Scenario scenario_;
  SimOptions options_;
  std::uint64_t tick_ = 0;
  std::vector<EgoVehicle> egos_;
  std::vector<traffic::TrafficAgent> agents_;
  std::vector<traffic::LightPhaseState> lights_;
  std::vector<Rng> sensor_rngs_;
  std::set<std::pair<std::int64_t, std::int64_t>> ego_contacts_;
  std::vector<SimEvent> event_log_;
  std::vector<CommandRecord> command_log_;
  std::uint64_t collisions_ = 0;
  bool sampling_ = false;
  TickOutput out_;
};

enum class ClockMode { realtime, fast };

/// Paces a loop to wall clock in realtime mode; a no-op in fast mode.
class Pacer {
 public:
  Pacer(ClockMode mode, double dt);
  /// Sleeps until tick `k` is due, measured from construction.
  void wait_for(std::uint64_t k);
  double elapsed_seconds() const;

 private:
  ClockMode mode_;
  double dt_;
  std::chrono::steady_clock::time_point start_;
};

/// Summary printed at exit.
struct RunReport {
  std::uint64_t ticks = 0;
  double wall_seconds = 0.0;
  std::uint64_t collisions = 0;
  std::map<std::string, std::uint64_t> events;
  std::vector<std::string> datasets;
  std::string final_state_hash;
  std::string event_log_hash;
};

/// Feeds a simulation's tick outputs into a dataset directory. Starting
/// backfills the command log from tick 0 so the dataset replays on its own.
class RecordingSession {
 public:
  RecordingSession(Simulation& sim, std::filesystem::path dir);
  ~RecordingSession();
  RecordingSession(const RecordingSession&) = delete;
  RecordingSession& operator=(const RecordingSession&) = delete;

  /// Call after every `step` while recording.
  void after_step(const TickOutput& out);
  /// Finalizes the manifest at the simulation's current tick.
  void stop();
  std::optional<std::string> error() const { return recorder_.error(); }
  const std::filesystem::path& directory() const { return recorder_.directory(); }

 private:
  Simulation& sim_;
  DatasetRecorder recorder_;
  std::size_t commands_written_ = 0;
  bool stopped_ = false;
};

struct ReplayResult {
  bool ok = false;
  std::optional<std::uint64_t> divergent_tick;
  std::string message;
  std::uint64_t samples_checked = 0;
};

/// Re-runs a dataset's scenario with its recorded commands and compares every
/// observation hash and the final state hash.
ReplayResult replay_dataset(const std::filesystem::path& dir, ClockMode mode = ClockMode::fast);

RunReport make_report(const Simulation& sim, double wall_seconds, std::vector<std::string> datasets = {});
nlohmann::json to_json(const RunReport& r);

}  // namespace drivesim
