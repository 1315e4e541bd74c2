#include "live_server.hpp"

namespace testing {

LiveServer::LiveServer(drivesim::Scenario scenario, drivesim::ClockMode mode, std::size_t budget, bool start)
    : mode_(mode),
      sim_(std::move(scenario)),
      broker_(sim_.scenario(), sim_.dt(), budget),
      server_(broker_, "127.0.0.1", 0) {
  server_.start();
  if (start) run();
}

LiveServer::~LiveServer() { stop(); }

void LiveServer::run() {
  if (loop_.joinable()) return;
  loop_ = std::thread([this] {
    drivesim::net::LoopOptions opts;
    opts.mode = mode_;
    drivesim::net::run_loop(sim_, &broker_, opts, &stop_);
  });
}

void LiveServer::stop() {
  stop_ = true;
  if (loop_.joinable()) loop_.join();
  server_.stop();
}

}  // namespace testing
