#include "drivesim/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drivesim/png_io.hpp"

namespace drivesim {

nlohmann::json to_json(const CommandRecord& c) {
  return {{"tick", c.tick},
          {"vehicle", c.vehicle},
          {"throttle", c.input.throttle},
          {"brake", c.input.brake},
          {"steer", c.input.steer}};
}

CommandRecord command_from_json(const nlohmann::json& j) {
  return {j.at("tick").get<std::uint64_t>(), j.at("vehicle").get<VehicleId>(),
          {j.at("throttle").get<double>(), j.at("brake").get<double>(), j.at("steer").get<double>()}};
}

std::string frame_path(const std::string& camera_id, std::uint64_t tick) {
  char name[32];
  std::snprintf(name, sizeof name, "%010llu.png", static_cast<unsigned long long>(tick));
  return "frames/" + camera_id + "/" + name;
}

nlohmann::json sample_line(const DatasetSample& s) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : s.frames) frames.push_back(frame_path(f->sensor_id, s.tick));
  const Observation& o = s.observation;
  return {{"tick", s.tick},
          {"timestamp", s.timestamp},
          {"vehicle", s.vehicle},
          {"action", {{"throttle", s.action.throttle}, {"brake", s.action.brake}, {"steer", s.action.steer}}},
          {"observation",
           {{"C_shape", {o.height, o.width, 3}}, {"R", o.R}, {"V", o.V}, {"N", o.N}, {"sha256", s.observation_hash}}},
          {"frames", std::move(frames)}};
}

nlohmann::json sensor_config_json(const SensorConfig& c) {
  nlohmann::json params;
  switch (c.kind) {
    case SensorKind::radar: {
      const auto& p = c.radar();
      params = {{"fov", p.fov}, {"max_range", p.max_range}, {"n_rays", p.n_rays}, {"noise_std", p.noise_std}};
      break;
    }
    case SensorKind::camera_rgb:
    case SensorKind::camera_semantic: {
      const auto& p = c.camera();
      params = {{"width_px", p.width_px},
                {"height_px", p.height_px},
                {"meters_per_px", p.meters_per_px},
                {"palette", p.palette}};
      break;
    }
    case SensorKind::imu:
      params = {{"noise_std_accel", c.imu().noise_std_accel}, {"noise_std_gyro", c.imu().noise_std_gyro}};
      break;
    case SensorKind::gnss: params = {{"noise_std_m", c.gnss().noise_std_m}}; break;
  }
  return {{"id", c.id},
          {"kind", to_string(c.kind)},
          {"vehicle", c.vehicle},
          {"mount", {c.mount.position.x, c.mount.position.y, c.mount.heading}},
          {"rate_hz", c.rate_hz},
          {"topic", c.topic},
          {"frame", c.frame},
          {"params", params}};
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.flush();
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

std::FILE* open_append(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return f;
}

void append_line(std::FILE* f, const std::string& line, const char* what) {
  if (std::fwrite(line.data(), 1, line.size(), f) != line.size() || std::fputc('\n', f) == EOF ||
      std::fflush(f) != 0) {
    throw std::runtime_error(std::string("write failed: ") + what);
  }
}

}  // namespace

DatasetRecorder::DatasetRecorder(std::filesystem::path out_dir, const Scenario& scenario, double dt,
                                 std::uint64_t start_tick, std::size_t history_len, std::size_t queue_capacity)
    : dir_(std::move(out_dir)), capacity_(std::max<std::size_t>(1, queue_capacity)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "frames", ec);
  if (ec) throw std::runtime_error("cannot create " + (dir_ / "frames").string() + ": " + ec.message());

  nlohmann::json sensors = nlohmann::json::array();
  for (const auto& s : scenario.sensors) sensors.push_back(sensor_config_json(s));
  manifest_ = {{"format", kDatasetFormat},
               {"scenario_hash", scenario.hash},
               {"scenario_file", "scenario.yaml"},
               {"seed", scenario.seed},
               {"dt", dt},
               {"egos", scenario.ego_ids()},
               {"sensors", std::move(sensors)},
               {"start_tick", start_tick},
               {"commands_file", "commands.jsonl"},
               {"samples_file", "samples.jsonl"},
               {"observation",
                {{"history_len", history_len},
                 {"C", "height x width x 3 uint8, rgb cameras concatenated left to right in config order"},
                 {"R", {"next_waypoint_distance", "lateral_offset", "heading_error", "speed_limit"}},
                 {"V", {"speed", "accel_long", "accel_lat", "yaw_rate", "steer", "throttle", "brake"}},
                 {"N", "bearing and distance of the next 5 route waypoints, interleaved"}}}};

  commands_.reset(open_append(dir_ / "commands.jsonl"));
  samples_file_.reset(open_append(dir_ / "samples.jsonl"));
  write_text(dir_ / "scenario.yaml", scenario.source);
  worker_ = std::thread([this] { run(); });
}

DatasetRecorder::~DatasetRecorder() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  not_empty_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void DatasetRecorder::enqueue(std::function<void()> job) {
  std::unique_lock lock(mu_);
  not_full_.wait(lock, [&] { return queue_.size() < capacity_ || stop_; });
  if (stop_ || error_) return;
  queue_.push_back(std::move(job));
  not_empty_.notify_one();
}

void DatasetRecorder::run() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mu_);
      not_empty_.wait(lock, [&] { return !queue_.empty() || stop_; });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    not_full_.notify_one();
    bool skip;
    {
      std::lock_guard lock(mu_);
      skip = error_.has_value();
    }
    if (skip) continue;
    try {
      job();
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
}

void DatasetRecorder::fail(const std::string& what) {
  std::lock_guard lock(mu_);
  if (!error_) error_ = what;
}

std::optional<std::string> DatasetRecorder::error() const {
  std::lock_guard lock(mu_);
  return error_;
}

void DatasetRecorder::add_command(const CommandRecord& c) {
  enqueue([this, line = to_json(c).dump()] { append_line(commands_.get(), line, "commands.jsonl"); });
}

void DatasetRecorder::add_frame(std::shared_ptr<const CameraFrame> frame, std::uint64_t tick) {
  enqueue([this, frame = std::move(frame), tick] {
    const std::filesystem::path path = dir_ / frame_path(frame->sensor_id, tick);
    std::filesystem::create_directories(path.parent_path());
    write_png(path, frame->width_px, frame->height_px, static_cast<int>(frame->channels()), frame->pixels);
  });
}

void DatasetRecorder::add_sample(DatasetSample sample) {
  ++samples_;
  enqueue([this, line = sample_line(sample).dump()] { append_line(samples_file_.get(), line, "samples.jsonl"); });
}

void DatasetRecorder::finalize(std::uint64_t end_tick, const std::string& final_state_hash) {
  if (finalized_) return;
  finalized_ = true;
  manifest_["end_tick"] = end_tick;
  manifest_["sample_count"] = samples_;
  manifest_["final_state_hash"] = final_state_hash;
  enqueue([this, text = manifest_.dump(2) + "\n"] { write_text(dir_ / "manifest.json", text); });
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  not_empty_.notify_all();
  not_full_.notify_all();
  if (worker_.joinable()) worker_.join();
  commands_.reset();
  samples_file_.reset();
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& dir) {
  DatasetManifest m;
  try {
    m.raw = nlohmann::json::parse(read_text(dir / "manifest.json"));
    if (m.raw.at("format") != kDatasetFormat) throw std::runtime_error("unsupported dataset format");
    m.scenario_hash = m.raw.at("scenario_hash").get<std::string>();
    m.seed = m.raw.at("seed").get<std::uint64_t>();
    m.dt = m.raw.at("dt").get<double>();
    m.start_tick = m.raw.at("start_tick").get<std::uint64_t>();
    m.end_tick = m.raw.at("end_tick").get<std::uint64_t>();
    m.sample_count = m.raw.at("sample_count").get<std::uint64_t>();
    m.history_len = m.raw.at("observation").at("history_len").get<std::size_t>();
    m.final_state_hash = m.raw.at("final_state_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error((dir / "manifest.json").string() + ": " + e.what());
  }
  return m;
}

std::vector<CommandRecord> read_commands(const std::filesystem::path& dir) {
  std::vector<CommandRecord> out;
  for (const auto& j : read_jsonl(dir / "commands.jsonl")) out.push_back(command_from_json(j));
  return out;
}

std::vector<nlohmann::json> read_samples(const std::filesystem::path& dir) {
  return read_jsonl(dir / "samples.jsonl");
}

}  // namespace drivesim
