#include "drivesim/net/protocol.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace drivesim::net {

std::optional<Envelope> parse_envelope(std::string_view text, std::string* why) {
  auto reject = [&](const char* reason) -> std::optional<Envelope> {
    if (why) *why = reason;
    return std::nullopt;
  };
  const nlohmann::json j = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return reject("not JSON");
  if (!j.is_object()) return reject("envelope must be an object");
  const auto event = j.find("event");
  if (event == j.end() || !event->is_string()) return reject("missing string field 'event'");
  const auto topic = j.find("topic");
  if (topic == j.end() || !topic->is_string()) return reject("missing string field 'topic'");
  const auto seq = j.find("seq");
  if (seq == j.end() || !seq->is_number_unsigned()) return reject("missing unsigned field 'seq'");
  Envelope e;
  e.event = event->get<std::string>();
  e.topic = topic->get<std::string>();
  e.seq = seq->get<std::uint64_t>();
  if (const auto t = j.find("sim_time"); t != j.end()) {
    if (!t->is_number()) return reject("'sim_time' must be a number");
    e.sim_time = t->get<double>();
  }
  if (const auto p = j.find("payload"); p != j.end()) {
    if (!p->is_object()) return reject("'payload' must be an object");
    e.payload = *p;
  }
  return e;
}

namespace {

std::string head_of(const std::string& event, const std::string& payload_text) {
  return "{\"event\":" + nlohmann::json(event).dump() + ",\"payload\":" + payload_text + ",\"seq\":";
}

std::string tail_of(double sim_time, const std::string& topic) {
  return ",\"sim_time\":" + nlohmann::json(sim_time).dump() + ",\"topic\":" + nlohmann::json(topic).dump() + "}";
}

}  // namespace

std::string serialize(const Envelope& e) {
  return head_of(e.event, e.payload.dump()) + std::to_string(e.seq) + tail_of(e.sim_time, e.topic);
}

std::string Prepared::render(std::uint64_t seq, bool binary_frames) const {
  if (binary_frames && binary) return binary_head + std::to_string(seq) + binary_tail;
  return head + std::to_string(seq) + tail;
}

std::size_t Prepared::size_hint(bool binary_frames) const {
  if (binary_frames && binary) return binary_head.size() + binary_tail.size() + binary->size() + 20;
  return head.size() + tail.size() + 20;
}

std::shared_ptr<const Prepared> prepare(const std::string& topic, const std::string& event, double sim_time,
                                        const nlohmann::json& payload) {
  auto p = std::make_shared<Prepared>();
  p->topic = topic;
  p->head = head_of(event, payload.dump());
  p->tail = tail_of(sim_time, topic);
  return p;
}

std::shared_ptr<const Prepared> prepare_camera(const std::string& topic, double sim_time, const CameraFrame& frame) {
  auto p = std::make_shared<Prepared>();
  p->topic = topic;
  nlohmann::json inline_payload = camera_header(frame);
  inline_payload["encoding"] = "base64";
  inline_payload["data"] = base64_encode(frame.pixels);
  p->head = head_of("publish", inline_payload.dump());
  p->tail = tail_of(sim_time, topic);

  nlohmann::json header = camera_header(frame);
  header["encoding"] = "binary";
  header["bytes"] = frame.pixels.size();
  p->binary_head = head_of("publish", header.dump());
  p->binary_tail = p->tail;
  const auto schema =
      frame.mode == CameraFrame::Mode::rgb ? BinarySchema::camera_rgb : BinarySchema::camera_semantic;
  p->binary = std::make_shared<const std::string>(binary_frame(schema, frame.pixels));
  return p;
}

std::string binary_frame(BinarySchema schema, std::span<const std::uint8_t> payload) {
  std::string out;
  out.reserve(6 + payload.size());
  const auto n = static_cast<std::uint32_t>(payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  const auto id = static_cast<std::uint16_t>(schema);
  out.push_back(static_cast<char>(id & 0xff));
  out.push_back(static_cast<char>(id >> 8));
  out.append(reinterpret_cast<const char*>(payload.data()), payload.size());
  return out;
}

bool is_wildcard(std::string_view pattern) { return pattern.size() >= 2 && pattern.ends_with("/*"); }

bool topic_matches(std::string_view pattern, std::string_view topic) {
  if (is_wildcard(pattern)) {
    const std::string_view prefix = pattern.substr(0, pattern.size() - 1);  // keeps the slash
    return topic.size() > prefix.size() && topic.starts_with(prefix);
  }
  return pattern == topic;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw std::invalid_argument("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw std::invalid_argument("invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

nlohmann::json to_json(const RadarScan& s) {
  return {{"sensor_id", s.sensor_id},
          {"timestamp", s.timestamp},
          {"distances", s.distances},
          {"fov", s.fov},
          {"max_range", s.max_range}};
}

nlohmann::json to_json(const ImuSample& s) {
  return {{"sensor_id", s.sensor_id},
          {"timestamp", s.timestamp},
          {"accel_body", {s.accel_x, s.accel_y}},
          {"gyro_z", s.gyro_z}};
}

nlohmann::json to_json(const GnssFix& s) {
  return {{"sensor_id", s.sensor_id}, {"timestamp", s.timestamp}, {"position", {s.position.x, s.position.y}}};
}

nlohmann::json camera_header(const CameraFrame& f) {
  return {{"sensor_id", f.sensor_id},
          {"timestamp", f.timestamp},
          {"width_px", f.width_px},
          {"height_px", f.height_px},
          {"meters_per_px", f.meters_per_px},
          {"mode", f.mode == CameraFrame::Mode::rgb ? "rgb" : "semantic"}};
}

nlohmann::json to_json(const VehiclePose& p) {
  return {{"id", p.id}, {"x", p.pose.position.x}, {"y", p.pose.position.y}, {"heading", p.pose.heading},
          {"speed", p.speed}};
}

}  // namespace drivesim::net
