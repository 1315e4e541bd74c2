#include "drivesim/net/broker.hpp"

#include <algorithm>
#include <charconv>

namespace drivesim::net {

namespace {

std::string schema_of(SensorKind k) {
  switch (k) {
    case SensorKind::radar: return "radar_scan";
    case SensorKind::imu: return "imu_sample";
    case SensorKind::gnss: return "gnss_fix";
    case SensorKind::camera_rgb:
    case SensorKind::camera_semantic: return "camera_frame";
  }
  return "";
}

const char* to_string(Publisher p) { return p == Publisher::simulator ? "simulator" : "client"; }

std::string control_topic(VehicleId id) { return "/ego/" + std::to_string(id) + "/control"; }

}  // namespace

Broker::Broker(const Scenario& scenario, double dt, std::size_t session_budget)
    : dt_(dt), scenario_hash_(scenario.hash), egos_(scenario.ego_ids()), budget_(session_budget) {
  std::sort(egos_.begin(), egos_.end());
  for (const auto& s : scenario.sensors) topics_[s.topic] = {schema_of(s.kind), Publisher::simulator, false};
  for (const auto& v : scenario.vehicles) {
    if (v.role == Role::ego) {
      topics_["/ego/" + std::to_string(v.id) + "/pose"] = {"pose", Publisher::simulator, true};
      topics_[control_topic(v.id)] = {"control", Publisher::client, false};
    } else {
      topics_["/traffic/" + std::to_string(v.id) + "/pose"] = {"pose", Publisher::simulator, false};
    }
  }
  topics_["/sim/events"] = {"event", Publisher::simulator, false};
  topics_["/sim/clock"] = {"time", Publisher::simulator, false};
  topics_["/sim/recorder"] = {"recorder", Publisher::client, false};
}

nlohmann::json Broker::hello_payload(const std::string& session_id, bool binary_frames) const {
  nlohmann::json topics = nlohmann::json::array();
  for (const auto& [name, info] : topics_) {
    topics.push_back({{"topic", name},
                      {"schema", info.schema},
                      {"publisher", to_string(info.publisher)},
                      {"retained", info.retained}});
  }
  return {{"protocol", kProtocolVersion},
          {"session", session_id},
          {"scenario_hash", scenario_hash_},
          {"dt", dt_},
          {"egos", egos_},
          {"topics", std::move(topics)},
          {"binary_frames", binary_frames},
          {"next_tick", next_latch_tick_}};
}

Broker::SessionId Broker::connect(std::shared_ptr<Sink> sink) {
  std::lock_guard lock(mu_);
  const SessionId id = next_id_++;
  Session& s = sessions_[id];
  s.id = id;
  s.name = "c" + std::to_string(id);
  s.sink = std::move(sink);
  send_locked(s, "", "hello", hello_payload(s.name, false));
  sweep_locked();
  return id;
}

void Broker::disconnect(SessionId id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return;
  release_locked(it->second);
  closed_[it->second.name] = {it->second.name, "disconnected", 0, it->second.sent};
  sessions_.erase(it);
}

void Broker::release_locked(Session& s) {
  if (!s.claimed) return;
  // Safe stop: the released ego brakes fully until someone claims it.
  pending_[*s.claimed] = {0.0, 1.0, 0.0};
  holders_.erase(*s.claimed);
  s.claimed.reset();
}

void Broker::send_locked(Session& s, const Prepared& msg) {
  if (!s.open) return;
  const std::size_t size = msg.size_hint(s.binary_frames);
  if (s.sink->pending_bytes() + size > budget_) {
    close_locked(s, "slow_consumer", "send queue exceeded " + std::to_string(budget_) + " bytes");
    return;
  }
  s.sink->deliver_text(msg.render(++s.seq_out, s.binary_frames));
  if (s.binary_frames && msg.binary) s.sink->deliver_binary(msg.binary);
  ++s.sent;
}

void Broker::send_locked(Session& s, const std::string& topic, const std::string& event,
                         const nlohmann::json& payload) {
  send_locked(s, *prepare(topic, event, sim_time_, payload));
}

void Broker::error_locked(Session& s, const std::string& topic, const std::string& code, const std::string& message,
                          nlohmann::json extra) {
  extra["code"] = code;
  extra["message"] = message;
  send_locked(s, topic, "error", extra);
}

void Broker::close_locked(Session& s, const std::string& code, const std::string& message) {
  if (!s.open) return;
  const std::size_t pending = s.sink->pending_bytes();
  // The final error bypasses the budget; a stalled reader may never see it.
  const nlohmann::json payload = {{"code", code}, {"message", message}};
  s.sink->deliver_text(prepare("", "error", sim_time_, payload)->render(++s.seq_out, false));
  s.sink->close();
  s.open = false;
  release_locked(s);
  closed_[s.name] = {s.name, code, pending, s.sent};
}

void Broker::sweep_locked() {
  std::erase_if(sessions_, [](const auto& kv) { return !kv.second.open; });
}

void Broker::on_binary(SessionId id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return;
  close_locked(it->second, "bad_envelope", "binary frames are not accepted from clients");
  sweep_locked();
}

void Broker::on_text(SessionId id, std::string_view text) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end() || !it->second.open) return;
  Session& s = it->second;
  std::string why;
  const auto env = parse_envelope(text, &why);
  if (!env) {
    close_locked(s, "bad_envelope", why);
  } else if (s.last_seq_in && env->seq <= *s.last_seq_in) {
    error_locked(s, env->topic, "stale_seq",
                 "seq " + std::to_string(env->seq) + " does not exceed " + std::to_string(*s.last_seq_in));
  } else {
    s.last_seq_in = env->seq;
    handle_locked(s, *env);
  }
  sweep_locked();
}

std::optional<VehicleId> Broker::ego_of_topic(std::string_view topic) const {
  constexpr std::string_view prefix = "/ego/";
  constexpr std::string_view suffix = "/control";
  if (!topic.starts_with(prefix) || !topic.ends_with(suffix) || topic.size() <= prefix.size() + suffix.size()) {
    return std::nullopt;
  }
  const std::string_view digits = topic.substr(prefix.size(), topic.size() - prefix.size() - suffix.size());
  VehicleId id = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  if (!std::binary_search(egos_.begin(), egos_.end(), id)) return std::nullopt;
  return id;
}

void Broker::handle_locked(Session& s, const Envelope& e) {
  const std::string& ev = e.event;
  if (ev == "hello") {
    const auto bf = e.payload.find("binary_frames");
    if (bf != e.payload.end() && bf->is_boolean()) s.binary_frames = bf->get<bool>();
    send_locked(s, "", "hello", {{"session", s.name}, {"binary_frames", s.binary_frames}});
    return;
  }
  if (ev == "subscribe") {
    if (!is_wildcard(e.topic) && !topics_.contains(e.topic)) {
      error_locked(s, e.topic, "unknown_topic", "no topic " + e.topic);
      return;
    }
    s.patterns.insert(e.topic);
    nlohmann::json matched = nlohmann::json::array();
    for (const auto& [name, info] : topics_) {
      if (topic_matches(e.topic, name)) matched.push_back(name);
    }
    send_locked(s, e.topic, "subscribe", {{"topics", matched}});
    for (const auto& [name, msg] : retained_) {
      if (topic_matches(e.topic, name)) send_locked(s, *msg);
    }
    return;
  }
  if (ev == "unsubscribe") {
    const bool removed = s.patterns.erase(e.topic) > 0;
    send_locked(s, e.topic, "unsubscribe", {{"removed", removed}});
    return;
  }
  if (ev == "claim" || ev == "release" || ev == "command") {
    const auto ego = ego_of_topic(e.topic);
    if (!ego) {
      error_locked(s, e.topic, "unknown_topic", "expected /ego/<id>/control of an ego vehicle");
      return;
    }
    const auto holder = holders_.find(*ego);
    const bool mine = holder != holders_.end() && holder->second == s.id;
    if (ev == "claim") {
      if (holder != holders_.end() && !mine) {
        error_locked(s, e.topic, "claim_refused", "vehicle " + std::to_string(*ego) + " is held",
                     {{"holder", sessions_.at(holder->second).name}});
      } else if (s.claimed && *s.claimed != *ego) {
        error_locked(s, e.topic, "claim_refused", "session already holds vehicle " + std::to_string(*s.claimed),
                     {{"holder", s.name}});
      } else {
        holders_[*ego] = s.id;
        s.claimed = *ego;
        send_locked(s, e.topic, "claim", {{"vehicle", *ego}});
      }
    } else if (!mine) {
      error_locked(s, e.topic, "not_claimed", "vehicle " + std::to_string(*ego) + " is not held by this session");
    } else if (ev == "release") {
      release_locked(s);
      send_locked(s, e.topic, "release", {{"vehicle", *ego}});
    } else {
      double v[3] = {0.0, 0.0, 0.0};
      const char* keys[3] = {"throttle", "brake", "steer"};
      for (int i = 0; i < 3; ++i) {
        const auto f = e.payload.find(keys[i]);
        if (f == e.payload.end()) continue;
        if (!f->is_number()) {
          error_locked(s, e.topic, "bad_command", std::string("'") + keys[i] + "' must be a number");
          return;
        }
        v[i] = f->get<double>();
      }
      const dyn::ControlInput raw{v[0], v[1], v[2]};
      const dyn::ControlInput applied = dyn::ControlInput::clamped(v[0], v[1], v[2]);
      pending_[*ego] = applied;
      send_locked(s, e.topic, "command",
                  {{"apply_tick", next_latch_tick_},
                   {"clamped", !raw.in_range()},
                   {"throttle", applied.throttle},
                   {"brake", applied.brake},
                   {"steer", applied.steer}});
    }
    return;
  }
  if (ev == "publish" && e.topic == "/sim/recorder") {
    const auto rec = e.payload.find("record");
    if (rec == e.payload.end() || !rec->is_string() || (*rec != "start" && *rec != "stop")) {
      error_locked(s, e.topic, "bad_request", "payload.record must be \"start\" or \"stop\"");
    } else if (!recorder_available_) {
      error_locked(s, e.topic, "recorder_unavailable", "server was started without a recording directory");
    } else {
      recorder_request_ = RecorderRequest{*rec == "start"};
      send_locked(s, e.topic, "publish", {{"accepted", true}, {"record", *rec}});
    }
    return;
  }
  error_locked(s, e.topic, "unsupported_event", "cannot handle event '" + ev + "' on '" + e.topic + "'");
}

std::map<VehicleId, dyn::ControlInput> Broker::latch(std::uint64_t tick) {
  std::lock_guard lock(mu_);
  std::map<VehicleId, dyn::ControlInput> out;
  out.swap(pending_);
  next_latch_tick_ = tick + 1;
  return out;
}

void Broker::fan_out_locked(const std::shared_ptr<const Prepared>& msg, bool retain) {
  if (retain) retained_[msg->topic] = msg;
  for (auto& [id, s] : sessions_) {
    for (const auto& p : s.patterns) {
      if (topic_matches(p, msg->topic)) {
        send_locked(s, *msg);
        break;
      }
    }
  }
}

void Broker::publish_tick(const TickOutput& out, const Scenario& scenario) {
  std::lock_guard lock(mu_);
  sim_time_ = out.sim_time;
  auto wanted = [&](const std::string& topic) {
    for (const auto& [id, s] : sessions_) {
      for (const auto& p : s.patterns) {
        if (topic_matches(p, topic)) return true;
      }
    }
    return false;
  };
  for (const auto& so : out.sensors) {
    const std::string& topic = scenario.sensors[so.config_index].topic;
    if (!wanted(topic)) continue;  // serialization is the expensive part
    std::shared_ptr<const Prepared> msg;
    if (const auto* r = std::get_if<RadarScan>(&so.data)) {
      msg = prepare(topic, "publish", out.sim_time, to_json(*r));
    } else if (const auto* i = std::get_if<ImuSample>(&so.data)) {
      msg = prepare(topic, "publish", out.sim_time, to_json(*i));
    } else if (const auto* g = std::get_if<GnssFix>(&so.data)) {
      msg = prepare(topic, "publish", out.sim_time, to_json(*g));
    } else {
      msg = prepare_camera(topic, out.sim_time, *std::get<std::shared_ptr<const CameraFrame>>(so.data));
    }
    fan_out_locked(msg, false);
  }
  for (const auto& p : out.egos) {
    fan_out_locked(prepare("/ego/" + std::to_string(p.id) + "/pose", "publish", out.sim_time, to_json(p)), true);
  }
  for (const auto& p : out.traffic) {
    const std::string topic = "/traffic/" + std::to_string(p.id) + "/pose";
    if (wanted(topic)) fan_out_locked(prepare(topic, "publish", out.sim_time, to_json(p)), false);
  }
  for (const auto& e : out.events) fan_out_locked(prepare("/sim/events", "event", out.sim_time, to_json(e)), false);
  fan_out_locked(prepare("/sim/clock", "time", out.sim_time, {{"tick", out.tick}}), false);
  sweep_locked();
}

void Broker::publish_event(const SimEvent& e, double sim_time) {
  std::lock_guard lock(mu_);
  fan_out_locked(prepare("/sim/events", "event", sim_time, to_json(e)), false);
  sweep_locked();
}

std::optional<RecorderRequest> Broker::take_recorder_request() {
  std::lock_guard lock(mu_);
  auto r = recorder_request_;
  recorder_request_.reset();
  return r;
}

void Broker::set_recorder_available(bool on) {
  std::lock_guard lock(mu_);
  recorder_available_ = on;
}

std::optional<std::string> Broker::holder_of(VehicleId ego) const {
  std::lock_guard lock(mu_);
  const auto it = holders_.find(ego);
  if (it == holders_.end()) return std::nullopt;
  return sessions_.at(it->second).name;
}

std::vector<SessionStats> Broker::stats() const {
  std::lock_guard lock(mu_);
  std::vector<SessionStats> out;
  for (const auto& [id, s] : sessions_) out.push_back({s.name, std::nullopt, s.sink->pending_bytes(), s.sent});
  for (const auto& [name, st] : closed_) out.push_back(st);
  return out;
}

std::size_t Broker::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace drivesim::net
