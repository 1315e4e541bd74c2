#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drivesim/dynamics.hpp"
#include "drivesim/net/protocol.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/simulation.hpp"

namespace drivesim::net {

/// Transport side of one connection. `deliver` must not block: it queues the
/// message for writing. `pending_bytes` is what has been queued but not yet
/// handed to the socket.
class Sink {
 public:
  virtual ~Sink() = default;
  virtual void deliver_text(std::string text) = 0;
  virtual void deliver_binary(std::shared_ptr<const std::string> bytes) = 0;
  virtual void close() = 0;
  virtual std::size_t pending_bytes() const = 0;
};

enum class Publisher { simulator, client };

struct TopicInfo {
  std::string schema;
  Publisher publisher = Publisher::simulator;
  bool retained = false;
};

struct RecorderRequest {
  bool start = false;
};

struct SessionStats {
  std::string id;
  std::optional<std::string> closed_reason;
  std::size_t pending_at_close = 0;
  std::uint64_t messages_sent = 0;
};

/// Socket-independent publish/subscribe core. Every entry point is
/// thread-safe; the simulation thread calls `latch` and `publish_tick`,
/// transports call `connect`, `on_text` and `disconnect`.
class Broker {
 public:
  Broker(const Scenario& scenario, double dt, std::size_t session_budget = kDefaultSessionBudget);

  using SessionId = std::uint64_t;

  /// Registers a connection and sends its hello.
  SessionId connect(std::shared_ptr<Sink> sink);
  /// Releases the session's claim; a held ego gets a full-brake command.
  void disconnect(SessionId id);
  void on_text(SessionId id, std::string_view text);
  /// Binary client frames are not part of the protocol.
  void on_binary(SessionId id);

  /// Latest command per ego received since the previous latch. Called once
  /// at the start of tick `tick`.
  std::map<VehicleId, dyn::ControlInput> latch(std::uint64_t tick);

  /// Fans out one tick's outputs.
  void publish_tick(const TickOutput& out, const Scenario& scenario);
  /// Publishes a server-originated event on /sim/events.
  void publish_event(const SimEvent& e, double sim_time);

  std::optional<RecorderRequest> take_recorder_request();
  void set_recorder_available(bool on);

  const std::map<std::string, TopicInfo>& topics() const { return topics_; }
  nlohmann::json hello_payload(const std::string& session_id, bool binary_frames) const;
  std::optional<std::string> holder_of(VehicleId ego) const;
  std::vector<SessionStats> stats() const;
  std::size_t session_count() const;

 private:
  struct Session {
    SessionId id = 0;
    std::string name;
    std::shared_ptr<Sink> sink;
    std::uint64_t seq_out = 0;
    std::optional<std::uint64_t> last_seq_in;
    std::set<std::string> patterns;
    std::optional<VehicleId> claimed;
    bool binary_frames = false;
    bool open = true;
    std::uint64_t sent = 0;
  };

  void send_locked(Session& s, const Prepared& msg);
  void send_locked(Session& s, const std::string& topic, const std::string& event, const nlohmann::json& payload);
  void error_locked(Session& s, const std::string& topic, const std::string& code, const std::string& message,
                    nlohmann::json extra = nlohmann::json::object());
  /// Sends a final error, closes the transport and drops the session.
  void close_locked(Session& s, const std::string& code, const std::string& message);
  void sweep_locked();
  void release_locked(Session& s);
  void fan_out_locked(const std::shared_ptr<const Prepared>& msg, bool retain);
  void handle_locked(Session& s, const Envelope& e);
  std::optional<VehicleId> ego_of_topic(std::string_view topic) const;

  mutable std::mutex mu_;
  double dt_;
  std::string scenario_hash_;
  std::vector<VehicleId> egos_;
  std::size_t budget_;
  std::map<std::string, TopicInfo> topics_;
  std::map<SessionId, Session> sessions_;
  std::map<std::string, SessionStats> closed_;
  std::map<VehicleId, SessionId> holders_;
  std::map<std::string, std::shared_ptr<const Prepared>> retained_;
  std::map<VehicleId, dyn::ControlInput> pending_;
  std::uint64_t next_latch_tick_ = 0;
  double sim_time_ = 0.0;
  SessionId next_id_ = 1;
  std::optional<RecorderRequest> recorder_request_;
  bool recorder_available_ = false;
};

}  // namespace drivesim::net
