#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drivesim/camera.hpp"
#include "drivesim/sensors.hpp"
#include "drivesim/simulation.hpp"

namespace drivesim::net {

inline constexpr const char* kProtocolVersion = "drivesim/1";
inline constexpr std::uint16_t kDefaultPort = 9090;
inline constexpr std::size_t kDefaultSessionBudget = 16u << 20;

/// Schema ids of binary camera frames.
enum class BinarySchema : std::uint16_t { camera_semantic = 1, camera_rgb = 2 };

struct Envelope {
  std::string topic;
  std::string event;
  std::uint64_t seq = 0;
  double sim_time = 0.0;
  nlohmann::json payload = nlohmann::json::object();
};

/// Parses a client envelope. Requires an object with string `event` and
/// `topic` and an unsigned `seq`; `payload` defaults to {} and `sim_time` to 0.
/// Returns nullopt and fills `why` on violation.
std::optional<Envelope> parse_envelope(std::string_view text, std::string* why = nullptr);

/// Canonical serialization: keys in lexical order, doubles round-trip exact.
std::string serialize(const Envelope& e);

/// An outgoing envelope serialized once for all receivers. Only the sequence
/// number differs per connection; it is spliced between `head` and `tail`.
struct Prepared {
  std::string topic;
  std::string head;  // up to and including "seq":
  std::string tail;  // from the comma after seq to the end
  /// Camera envelopes for binary-frame connections: a header-only text part
  /// followed by `binary`.
  std::string binary_head;
  std::string binary_tail;
  std::shared_ptr<const std::string> binary;

  std::string render(std::uint64_t seq, bool binary_frames) const;
  std::size_t size_hint(bool binary_frames) const;
};

std::shared_ptr<const Prepared> prepare(const std::string& topic, const std::string& event, double sim_time,
                                        const nlohmann::json& payload);

/// Camera envelope: inline base64 for JSON connections, header plus a
/// following binary frame for binary connections.
std::shared_ptr<const Prepared> prepare_camera(const std::string& topic, double sim_time, const CameraFrame& frame);

/// u32 little-endian payload length, u16 little-endian schema id, payload.
std::string binary_frame(BinarySchema schema, std::span<const std::uint8_t> payload);

/// True if `pattern` equals `topic` or is a `prefix/*` wildcard covering it.
bool topic_matches(std::string_view pattern, std::string_view topic);
bool is_wildcard(std::string_view pattern);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

nlohmann::json to_json(const RadarScan& s);
nlohmann::json to_json(const ImuSample& s);
nlohmann::json to_json(const GnssFix& s);
/// Header fields of a camera frame without pixels.
nlohmann::json camera_header(const CameraFrame& f);
nlohmann::json to_json(const VehiclePose& p);

}  // namespace drivesim::net
