#include "drivesim/simulation.hpp"

#include <algorithm>
#include <thread>

#include "drivesim/hash.hpp"

namespace drivesim {

Simulation::Simulation(Scenario scenario, SimOptions options)
    : scenario_(std::move(scenario)), options_(std::move(options)) {
  scenario_.map.reindex();
  std::vector<const VehicleSpec*> specs;
  for (const auto& v : scenario_.vehicles) specs.push_back(&v);
  std::sort(specs.begin(), specs.end(), [](const VehicleSpec* a, const VehicleSpec* b) { return a->id < b->id; });
  for (const VehicleSpec* v : specs) {
    if (v->role == Role::ego) {
      EgoVehicle e;
      e.spec = *v;
      e.route = start_route(scenario_.map, v->initial_waypoint);
      const geo::Vec2 a = scenario_.map.waypoint(e.route.current_wp).position;
      const geo::Vec2 b = scenario_.map.waypoint(e.route.next_wp).position;
      e.state.pose = {a, std::atan2(b.y - a.y, b.x - a.x)};
      egos_.push_back(std::move(e));
    } else {
      agents_.push_back(traffic::make_agent(*v, scenario_.map, scenario_.seed));
    }
  }
  for (const auto& s : scenario_.sensors) sensor_rngs_.push_back(sensor_rng(scenario_.seed, s));
  lights_ = traffic::light_phases(scenario_.map, 0.0);
}

EgoVehicle* Simulation::ego(VehicleId id) {
  for (auto& e : egos_) {
    if (e.spec.id == id) return &e;
  }
  return nullptr;
}

const EgoVehicle* Simulation::find_ego(VehicleId id) const {
  return const_cast<Simulation*>(this)->ego(id);
}

std::vector<Footprint> Simulation::footprints() const {
  std::vector<Footprint> out;
  out.reserve(egos_.size() + agents_.size());
  for (const auto& e : egos_) {
    out.push_back(make_footprint(e.spec.id, SemanticClass::ego, e.state.pose, e.spec.params.length,
                                 e.spec.params.width));
  }
  for (const auto& a : agents_) {
    if (a.active) out.push_back(a.footprint());
  }
  return out;
}

void Simulation::set_ego_state(VehicleId id, const dyn::VehicleState& state) {
  if (EgoVehicle* e = ego(id)) e->state = state;
}

void Simulation::set_agent_state(VehicleId id, const dyn::VehicleState& state) {
  for (auto& a : agents_) {
    if (a.id == id) a.state = state;
  }
}

const TickOutput& Simulation::step(const std::map<VehicleId, dyn::ControlInput>& latched) {
  const std::uint64_t k = tick_;
  const double dt = options_.dt;
  const Weather& weather = scenario_.weather;
  out_ = TickOutput{};
  out_.tick = k;
  out_.sim_time = static_cast<double>(k) * dt;
  auto& events = out_.events;

  // (1) latch
  for (const auto& [id, raw] : latched) {
    EgoVehicle* e = ego(id);
    if (!e) continue;
    const dyn::ControlInput input = dyn::ControlInput::clamped(raw.throttle, raw.brake, raw.steer);
    if (!(input == e->input)) {
      e->input = input;
      command_log_.push_back({k, id, input});
    }
  }

  // (2) traffic against the previous snapshot
  {
    const std::vector<Footprint> snapshot = footprints();
    const WorldView view{&scenario_.map, snapshot};
    for (auto& a : agents_) {
      if (!a.active) continue;
      auto ev = traffic::advance_agent(a, view, lights_, weather, options_.traffic, dt, k);
      events.insert(events.end(), ev.begin(), ev.end());
    }
  }

  // (3) egos
  for (auto& e : egos_) {
    e.state = dyn::step_vehicle(e.state, e.spec.params, e.input, weather.friction_scale, dt);
    if (update_route(e.route, scenario_.map, e.state.pose.position, options_.ego_capture_radius)) {
      events.push_back({k, "waypoint_advanced", {e.spec.id, e.route.current_wp}, {{"next", e.route.next_wp}}});
    }
  }

  // (4) collisions
  {
    std::vector<Footprint> ego_fps;
    for (const auto& e : egos_) {
      ego_fps.push_back(make_footprint(e.spec.id, SemanticClass::ego, e.state.pose, e.spec.params.length,
                                       e.spec.params.width));
    }
    auto ev = traffic::detect_and_respawn(agents_, ego_fps, scenario_.map, scenario_.seed, k);
    events.insert(events.end(), ev.begin(), ev.end());

    // Egos are never relocated, so their contacts are reported on onset only.
    // Obstacle contacts are keyed with a negated, offset id.
    std::set<std::pair<std::int64_t, std::int64_t>> contacts;
    for (std::size_t i = 0; i < ego_fps.size(); ++i) {
      for (std::size_t j = i + 1; j < ego_fps.size(); ++j) {
        if (overlap(ego_fps[i], ego_fps[j].polygon)) contacts.insert({ego_fps[i].id, ego_fps[j].id});
      }
      for (const auto& solid : scenario_.map.solids()) {
        const auto& o = scenario_.map.obstacles[solid.index];
        if (overlap(ego_fps[i], o.polygon)) contacts.insert({ego_fps[i].id, -1 - o.id});
      }
    }
    for (const auto& c : contacts) {
      if (ego_contacts_.contains(c)) continue;
      if (c.second >= 0) {
        events.push_back({k, "collision", {c.first, c.second}, {}});
      } else {
        events.push_back({k, "collision", {c.first}, {{"obstacle", -1 - c.second}}});
      }
    }
    ego_contacts_ = std::move(contacts);
  }

  // (5) lights
  {
    auto next = traffic::light_phases(scenario_.map, static_cast<double>(k + 1) * dt);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i].phase != lights_[i].phase) {
        events.push_back({k, "light_changed", {next[i].light}, {{"phase", to_string(next[i].phase)}}});
      }
    }
    lights_ = std::move(next);
  }

  // (6) sensors
  const std::vector<Footprint> post = footprints();
  if (options_.sensors) sample_sensors(WorldView{&scenario_.map, post}, out_);

  // (7) dataset samples
  if (sampling_) build_samples(out_);

  for (const auto& e : events) {
    if (e.type == "collision") ++collisions_;
  }
  event_log_.insert(event_log_.end(), events.begin(), events.end());
  for (const auto& e : egos_) out_.egos.push_back({e.spec.id, e.state.pose, e.state.speed});
  for (const auto& a : agents_) {
    if (a.active) out_.traffic.push_back({a.id, a.state.pose, a.state.speed});
  }
  out_.lights = lights_;

  // (9) clock; (8) publishing is done by the caller with the returned outputs
  ++tick_;
  return out_;
}

void Simulation::sample_sensors(const WorldView& view, TickOutput& out) {
  const auto due = schedule_due(scenario_.sensors, out.tick, options_.dt);
  for (const std::size_t i : due) {
    const SensorConfig& cfg = scenario_.sensors[i];
    const EgoVehicle* carrier = find_ego(cfg.vehicle);
    if (!carrier) continue;
    const double t = out.sim_time;
    switch (cfg.kind) {
      case SensorKind::radar:
        out.sensors.push_back({i, sample_radar(cfg, carrier->state.pose, cfg.vehicle, view, t, sensor_rngs_[i],
                                               scenario_.weather.sensor_noise_scale)});
        break;
      case SensorKind::imu:
        out.sensors.push_back({i, sample_imu(cfg, carrier->state, scenario_.weather, t, sensor_rngs_[i])});
        break;
      case SensorKind::gnss:
        out.sensors.push_back({i, sample_gnss(cfg, carrier->state, scenario_.weather, t, sensor_rngs_[i])});
        break;
      case SensorKind::camera_rgb:
      case SensorKind::camera_semantic:
        out.sensors.push_back(
            {i, std::make_shared<const CameraFrame>(
                    render_camera(cfg, geo::compose(carrier->state.pose, cfg.mount), view, t))});
        break;
    }
  }
}

void Simulation::build_samples(TickOutput& out) {
  for (const auto& e : egos_) {
    std::vector<std::shared_ptr<const CameraFrame>> frames;
    bool complete = true;
    bool any = false;
    for (std::size_t i = 0; i < scenario_.sensors.size(); ++i) {
      const SensorConfig& cfg = scenario_.sensors[i];
      if (cfg.vehicle != e.spec.id || cfg.kind != SensorKind::camera_rgb) continue;
      any = true;
      std::shared_ptr<const CameraFrame> frame;
      for (const auto& s : out.sensors) {
        if (s.config_index == i) frame = std::get<std::shared_ptr<const CameraFrame>>(s.data);
      }
      if (!frame) complete = false;
      frames.push_back(std::move(frame));
    }
    // An observation needs every rgb camera; ticks where some are not due
    // carry no sample.
    if (any && !complete) continue;
    std::vector<const CameraFrame*> ptrs;
    for (const auto& f : frames) ptrs.push_back(f.get());
    DatasetSample s;
    s.tick = out.tick;
    s.timestamp = out.sim_time;
    s.vehicle = e.spec.id;
    s.action = e.input;
    s.observation = build_observation(e.state, e.input, e.route, scenario_.map, ptrs);
    s.observation_hash = s.observation.hash();
    s.frames = std::move(frames);
    out.samples.push_back(std::move(s));
  }
}

std::string Simulation::state_hash() const {
  Sha256 h;
  h.add(tick_);
  auto add_state = [&](const dyn::VehicleState& s) {
    h.add(s.pose.position.x).add(s.pose.position.y).add(s.pose.heading);
    h.add(s.speed).add(s.yaw_rate).add(s.accel_long).add(s.accel_lat);
  };
  for (const auto& e : egos_) {
    h.add(e.spec.id);
    add_state(e.state);
    h.add(e.input.throttle).add(e.input.brake).add(e.input.steer);
    h.add(e.route.current_wp).add(e.route.next_wp);
  }
  for (const auto& a : agents_) {
    h.add(a.id).add(a.active);
    add_state(a.state);
    h.add(a.current_wp).add(a.next_wp).add(a.generation);
    h.add(static_cast<int>(a.halt)).add(a.committed_through.value_or(-1));
    h.add(a.speed_pid.integral()).add(a.steer_pid.integral());
    Rng probe = a.rng;
    h.add(probe.next_u64());
  }
  for (const auto& l : lights_) h.add(l.light).add(static_cast<int>(l.phase)).add(l.time_into_phase);
  for (const auto& r : sensor_rngs_) {
    Rng probe = r;
    h.add(probe.next_u64());
  }
  return h.hex();
}

std::string Simulation::event_log_hash() const {
  Sha256 h;
  for (const auto& e : event_log_) h.update(to_json(e).dump()).update("\n");
  return h.hex();
}

Pacer::Pacer(ClockMode mode, double dt) : mode_(mode), dt_(dt), start_(std::chrono::steady_clock::now()) {}

void Pacer::wait_for(std::uint64_t k) {
  if (mode_ == ClockMode::fast) return;
  const auto due = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(static_cast<double>(k) * dt_));
  std::this_thread::sleep_until(due);
}

double Pacer::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

RecordingSession::RecordingSession(Simulation& sim, std::filesystem::path dir)
    : sim_(sim),
      recorder_(std::move(dir), sim.scenario(), sim.dt(), sim.tick(), sim.options().history_len) {
  for (const auto& c : sim_.command_log()) recorder_.add_command(c);
  commands_written_ = sim_.command_log().size();
  sim_.set_sampling(true);
}

RecordingSession::~RecordingSession() { stop(); }

void RecordingSession::after_step(const TickOutput& out) {
  if (stopped_) return;
  const auto& log = sim_.command_log();
  for (; commands_written_ < log.size(); ++commands_written_) recorder_.add_command(log[commands_written_]);
  for (const auto& s : out.sensors) {
    if (const auto* f = std::get_if<std::shared_ptr<const CameraFrame>>(&s.data)) recorder_.add_frame(*f, out.tick);
  }
  for (const auto& s : out.samples) recorder_.add_sample(s);
}

void RecordingSession::stop() {
  if (stopped_) return;
  stopped_ = true;
  sim_.set_sampling(false);
  recorder_.finalize(sim_.tick(), sim_.state_hash());
}

ReplayResult replay_dataset(const std::filesystem::path& dir, ClockMode mode) {
  ReplayResult r;
  const DatasetManifest m = read_manifest(dir);
  Scenario sc = load_scenario(dir / "scenario.yaml");
  if (sc.hash != m.scenario_hash) {
    r.message = "scenario.yaml does not match the manifest's scenario hash";
    return r;
  }
  const auto commands = read_commands(dir);
  const auto samples = read_samples(dir);

  SimOptions opts;
  opts.dt = m.dt;
  opts.history_len = m.history_len;
  Simulation sim(std::move(sc), opts);
  Pacer pacer(mode, m.dt);
  std::size_t ci = 0;
  std::size_t si = 0;
  for (std::uint64_t k = 0; k < m.end_tick; ++k) {
    std::map<VehicleId, dyn::ControlInput> latched;
    for (; ci < commands.size() && commands[ci].tick == k; ++ci) latched[commands[ci].vehicle] = commands[ci].input;
    if (k == m.start_tick) sim.set_sampling(true);
    pacer.wait_for(k);
    const TickOutput& out = sim.step(latched);
    for (const auto& s : out.samples) {
      if (si >= samples.size()) {
        r.divergent_tick = k;
        r.message = "replay produced more samples than were recorded";
        return r;
      }
      const auto& want = samples[si++];
      if (want.at("tick").get<std::uint64_t>() != s.tick || want.at("vehicle").get<VehicleId>() != s.vehicle ||
          want.at("observation").at("sha256").get<std::string>() != s.observation_hash) {
        r.divergent_tick = k;
        r.message = "observation of vehicle " + std::to_string(s.vehicle) + " differs at tick " + std::to_string(k);
        return r;
      }
      ++r.samples_checked;
    }
  }
  if (ci != commands.size()) {
    r.message = "commands recorded past the end tick";
    r.divergent_tick = m.end_tick;
    return r;
  }
  if (si != samples.size()) {
    r.divergent_tick = m.end_tick;
    r.message = "replay produced fewer samples than were recorded";
    return r;
  }
  if (sim.state_hash() != m.final_state_hash) {
    r.divergent_tick = m.end_tick;
    r.message = "final state hash differs";
    return r;
  }
  r.ok = true;
  r.message = "ok";
  return r;
}

RunReport make_report(const Simulation& sim, double wall_seconds, std::vector<std::string> datasets) {
  RunReport r;
  r.ticks = sim.tick();
  r.wall_seconds = wall_seconds;
  r.collisions = sim.collision_count();
  for (const auto& e : sim.event_log()) ++r.events[e.type];
  r.datasets = std::move(datasets);
  r.final_state_hash = sim.state_hash();
  r.event_log_hash = sim.event_log_hash();
  return r;
}

nlohmann::json to_json(const RunReport& r) {
  return {{"ticks", r.ticks},
          {"wall_seconds", r.wall_seconds},
          {"collisions", r.collisions},
          {"events", r.events},
          {"datasets", r.datasets},
          {"final_state_hash", r.final_state_hash},
          {"event_log_hash", r.event_log_hash}};
}

}  // namespace drivesim
