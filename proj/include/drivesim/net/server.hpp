#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "drivesim/net/broker.hpp"

namespace drivesim::net {

/// WebSocket transport for a Broker. Connection handling runs on its own I/O
/// thread; no socket work ever happens on the simulation thread.
class Server {
 public:
  /// Binds immediately; throws std::runtime_error when the port is taken.
  /// Port 0 picks a free port.
  Server(Broker& broker, const std::string& address, std::uint16_t port);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void start();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Port from DRIVESIM_PORT if set and valid, else the default.
std::uint16_t port_from_env(std::uint16_t fallback = kDefaultPort);

}  // namespace drivesim::net
