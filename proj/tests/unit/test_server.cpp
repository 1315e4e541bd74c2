#include <doctest.h>

#include <chrono>
#include <thread>

#include "fixtures.hpp"
#include "live_server.hpp"
#include "ws_client.hpp"

using namespace drivesim;
using namespace std::chrono_literals;
using testing::envelope;
using testing::LiveServer;
using testing::WsClient;

namespace {

Scenario bridge() { return load_scenario(testing::source_dir() / "tests/golden/bridge.yaml"); }

template <typename F>
bool eventually(F f, std::chrono::milliseconds limit = 5000ms) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (f()) return true;
    std::this_thread::sleep_for(5ms);
  }
  return f();
}

std::optional<std::string> close_reason(net::Broker& b, const std::string& id) {
  for (const auto& s : b.stats()) {
    if (s.id == id) return s.closed_reason;
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE("server") {
  TEST_CASE("handshake over the wire is byte-exact") {
    LiveServer srv(bridge(), ClockMode::realtime, net::kDefaultSessionBudget, false);
    WsClient c("127.0.0.1", srv.port());
    const auto hello = c.read();
    REQUIRE(hello);
    CHECK_FALSE(hello->binary);
    CHECK(testing::golden("handshake.txt", hello->data + "\n") == "");
  }

  TEST_CASE("clock ticks arrive in order at 100 Hz") {
    LiveServer srv(bridge(), ClockMode::realtime);
    WsClient c("127.0.0.1", srv.port());
    c.send(envelope("subscribe", "/sim/clock", 1));
    REQUIRE(c.read_until([](const auto& j) { return j["event"] == "subscribe"; }));
    const auto first = c.read_until([](const auto& j) { return j["event"] == "time"; });
    REQUIRE(first);
    std::uint64_t expect = (*first)["payload"]["tick"].get<std::uint64_t>() + 1;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) {
      const auto j = c.read_json();
      REQUIRE(j);
      REQUIRE((*j)["payload"]["tick"] == expect++);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs == doctest::Approx(1.0).epsilon(0.2));
  }

  TEST_CASE("binary camera frames follow their header") {
    LiveServer srv(bridge(), ClockMode::realtime);
    WsClient c("127.0.0.1", srv.port());
    c.send(envelope("hello", "", 1, {{"binary_frames", true}}));
    c.send(envelope("subscribe", "/ego/0/camera/cam", 2));
    const auto header = c.read_until([](const auto& j) { return j["topic"] == "/ego/0/camera/cam" &&
                                                                j["event"] == "publish"; });
    REQUIRE(header);
    CHECK((*header)["payload"]["encoding"] == "binary");
    const auto frame = c.read();
    REQUIRE(frame);
    CHECK(frame->binary);
    REQUIRE(frame->data.size() == 6 + 12);
    CHECK(frame->data.substr(0, 6) == std::string("\x0c\x00\x00\x00\x01\x00", 6));
  }

  TEST_CASE("commands apply on the tick after the one the client saw") {
    LiveServer srv(bridge(), ClockMode::realtime);
    WsClient c("127.0.0.1", srv.port());
    std::uint64_t seq = 1;
    c.send(envelope("subscribe", "/sim/clock", seq++));
    c.send(envelope("claim", "/ego/0/control", seq++));
    REQUIRE(c.read_until([](const auto& j) { return j["event"] == "claim"; }));
    std::vector<std::pair<std::uint64_t, double>> sent;
    for (int trial = 0; trial < 10; ++trial) {
      const auto clock = c.read_until([](const auto& j) { return j["event"] == "time"; });
      REQUIRE(clock);
      const auto k = (*clock)["payload"]["tick"].get<std::uint64_t>();
      const double throttle = 0.05 * (trial + 1);
      c.send(envelope("command", "/ego/0/control", seq++, {{"throttle", throttle}}));
      const auto ack = c.read_until([](const auto& j) { return j["event"] == "command"; });
      REQUIRE(ack);
      CHECK((*ack)["payload"]["apply_tick"] == k + 1);
      sent.emplace_back((*ack)["payload"]["apply_tick"].get<std::uint64_t>(), throttle);
    }
    const auto last_tick = sent.back().first;
    REQUIRE(c.read_until([&](const auto& j) { return j["event"] == "time" && j["payload"]["tick"] >= last_tick; }));
    c.close();
    srv.stop();
    const auto& log = srv.sim().command_log();
    for (const auto& [tick, throttle] : sent) {
      bool found = false;
      for (const auto& rec : log) found |= rec.tick == tick && rec.input.throttle == throttle;
      CHECK(found);
    }
  }

  TEST_CASE("disconnect releases the claim") {
    LiveServer srv(bridge(), ClockMode::realtime);
    {
      WsClient c("127.0.0.1", srv.port());
      c.send(envelope("claim", "/ego/0/control", 1));
      REQUIRE(c.read_until([](const auto& j) { return j["event"] == "claim"; }));
      CHECK(srv.broker().holder_of(0) == "c1");
    }
    CHECK(eventually([&] { return !srv.broker().holder_of(0); }));
    WsClient d("127.0.0.1", srv.port());
    d.send(envelope("claim", "/ego/0/control", 1));
    CHECK(d.read_until([](const auto& j) { return j["event"] == "claim"; }));
  }

  TEST_CASE("a malformed envelope gets an error and a close") {
    LiveServer srv(bridge(), ClockMode::realtime);
    WsClient c("127.0.0.1", srv.port());
    c.send(std::string("{\"event\": 3}"));
    const auto err = c.read_until([](const auto& j) { return j["event"] == "error"; });
    REQUIRE(err);
    CHECK((*err)["payload"]["code"] == "bad_envelope");
    CHECK(eventually([&] { return !c.read(200ms) && c.closed(); }));
  }

  TEST_CASE("stopping with clients still connected drops their sessions") {
    Simulation sim(bridge());
    auto broker = std::make_unique<net::Broker>(sim.scenario(), sim.dt());
    std::optional<WsClient> c;
    {
      net::Server server(*broker, "127.0.0.1", 0);
      server.start();
      c.emplace("127.0.0.1", server.port());
      c->send(envelope("claim", "/ego/0/control", 1));
      REQUIRE(c->read_until([](const auto& j) { return j["event"] == "claim"; }));
      server.stop();
      CHECK(broker->session_count() == 0);
      CHECK_FALSE(broker->holder_of(0));
    }
    broker.reset();  // must not touch the stopped server's sockets
  }

  TEST_CASE("binding a taken port fails") {
    LiveServer srv(bridge(), ClockMode::realtime, net::kDefaultSessionBudget, false);
    const Scenario sc = bridge();
    net::Broker other(sc, 0.01);
    CHECK_THROWS_AS(net::Server(other, "127.0.0.1", srv.port()), std::runtime_error);
  }

  TEST_CASE("a stalled camera subscriber is cut at the budget; the clock stream is unaffected") {
    LiveServer srv(testing::load_fixture("city_block.yaml"), ClockMode::fast, net::kDefaultSessionBudget, false);
    WsClient healthy("127.0.0.1", srv.port());
    healthy.send(envelope("subscribe", "/sim/clock", 1));
    REQUIRE(healthy.read_until([](const auto& j) { return j["event"] == "subscribe"; }));
    WsClient stalled("127.0.0.1", srv.port(), 4096);
    stalled.send(envelope("subscribe", "/ego/0/camera/cam", 1));
    srv.run();

    std::optional<std::uint64_t> prev;
    bool contiguous = true;
    const auto deadline = std::chrono::steady_clock::now() + 120s;
    while (std::chrono::steady_clock::now() < deadline) {
      const auto j = healthy.read_json();
      REQUIRE(j);
      if ((*j)["event"] != "time") continue;
      const auto k = (*j)["payload"]["tick"].get<std::uint64_t>();
      if (prev && k != *prev + 1) contiguous = false;
      prev = k;
      if (close_reason(srv.broker(), "c2")) break;
    }
    CHECK(close_reason(srv.broker(), "c2") == "slow_consumer");
    CHECK(contiguous);
    // The healthy stream keeps flowing after the cut.
    for (int i = 0; i < 100; ++i) {
      const auto j = healthy.read_json();
      REQUIRE(j);
      REQUIRE((*j)["payload"]["tick"] == ++*prev);
    }
    CHECK_FALSE(close_reason(srv.broker(), "c1"));
  }
}
