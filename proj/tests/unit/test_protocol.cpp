#include <doctest.h>

#include "drivesim/net/protocol.hpp"

using namespace drivesim;
using namespace drivesim::net;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("envelopes parse with defaults") {
    const auto e = parse_envelope(R"({"event": "subscribe", "topic": "/sim/clock", "seq": 3})");
    REQUIRE(e);
    CHECK(e->event == "subscribe");
    CHECK(e->topic == "/sim/clock");
    CHECK(e->seq == 3);
    CHECK(e->sim_time == 0.0);
    CHECK(e->payload == nlohmann::json::object());
  }

  TEST_CASE("malformed envelopes say why") {
    std::string why;
    for (const char* bad : {"not json", "[1]", R"({"topic": "/a", "seq": 1})", R"({"event": "x", "seq": 1})",
                            R"({"event": "x", "topic": "/a", "seq": -1})", R"({"event": "x", "topic": "/a"})",
                            R"({"event": 5, "topic": "/a", "seq": 1})"}) {
      why.clear();
      CHECK_FALSE(parse_envelope(bad, &why));
      CHECK_FALSE(why.empty());
    }
  }

  TEST_CASE("serialization is canonical") {
    Envelope e{"/ego/0/pose", "publish", 7, 0.1, {{"z", 1}, {"a", 0.30000000000000004}}};
    const std::string s = serialize(e);
    CHECK(s == R"({"event":"publish","payload":{"a":0.30000000000000004,"z":1},"seq":7,"sim_time":0.1,)"
               R"("topic":"/ego/0/pose"})");
    const auto back = parse_envelope(s);
    REQUIRE(back);
    CHECK(back->payload["a"].get<double>() == 0.30000000000000004);
    CHECK(serialize(*back) == s);
  }

  TEST_CASE("prepared messages splice the sequence number") {
    const nlohmann::json payload{{"tick", 12}};
    const auto p = prepare("/sim/clock", "time", 0.12, payload);
    for (std::uint64_t seq : {1ull, 42ull, 18446744073709551615ull}) {
      CHECK(p->render(seq, false) == serialize({"/sim/clock", "time", seq, 0.12, payload}));
    }
    CHECK(p->size_hint(false) >= p->render(1, false).size());
  }

  TEST_CASE("binary frames: u32 length, u16 schema, payload") {
    const std::vector<std::uint8_t> px{1, 2, 3, 4, 5};
    const auto f = binary_frame(BinarySchema::camera_rgb, px);
    REQUIRE(f.size() == 11);
    CHECK(f.substr(0, 6) == std::string("\x05\x00\x00\x00\x02\x00", 6));
    CHECK(f.substr(6) == "\x01\x02\x03\x04\x05");
  }

  TEST_CASE("camera envelopes: inline base64 or header plus binary") {
    CameraFrame fr;
    fr.sensor_id = "cam";
    fr.width_px = 2;
    fr.height_px = 1;
    fr.mode = CameraFrame::Mode::semantic;
    fr.pixels = {7, 8};
    const auto p = prepare_camera("/ego/0/camera_semantic/cam", 1.5, fr);
    const auto inline_env = parse_envelope(p->render(3, false));
    REQUIRE(inline_env);
    CHECK(inline_env->payload["encoding"] == "base64");
    CHECK(base64_decode(inline_env->payload["data"].get<std::string>()) == fr.pixels);
    CHECK(inline_env->payload["width_px"] == 2);

    const auto header = parse_envelope(p->render(4, true));
    REQUIRE(header);
    CHECK(header->payload["encoding"] == "binary");
    CHECK(header->payload["bytes"] == 2);
    CHECK_FALSE(header->payload.contains("data"));
    CHECK(*p->binary == binary_frame(BinarySchema::camera_semantic, fr.pixels));
  }

  TEST_CASE("topic patterns") {
    CHECK(topic_matches("/sim/clock", "/sim/clock"));
    CHECK_FALSE(topic_matches("/sim/clock", "/sim/clocks"));
    CHECK(topic_matches("/ego/0/*", "/ego/0/pose"));
    CHECK(topic_matches("/ego/0/*", "/ego/0/radar/front"));
    CHECK_FALSE(topic_matches("/ego/0/*", "/ego/0"));
    CHECK_FALSE(topic_matches("/ego/0/*", "/ego/01/pose"));
    CHECK(topic_matches("/*", "/sim/events"));
    CHECK(is_wildcard("/ego/*"));
    CHECK_FALSE(is_wildcard("/ego/0/pose"));
  }

  TEST_CASE("base64 test vectors") {
    const std::pair<const char*, const char*> v[] = {{"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},
                                                     {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="},
                                                     {"foobar", "Zm9vYmFy"}};
    for (auto [plain, enc] : v) {
      CHECK(base64_encode(bytes(plain)) == enc);
      CHECK(base64_decode(enc) == bytes(plain));
    }
  }

  TEST_CASE("sensor payloads") {
    const auto r = to_json(RadarScan{"front", 0.5, {1.0, 2.5}, 1.0, 50});
    CHECK(r["distances"] == nlohmann::json::array({1.0, 2.5}));
    CHECK(r["sensor_id"] == "front");
    const auto g = to_json(GnssFix{"gnss", 1.0, {3, 4}});
    CHECK(g["sensor_id"] == "gnss");
    const auto p = to_json(VehiclePose{5, {{1, 2}, 0.5}, 3.0});
    CHECK(p["id"] == 5);
    CHECK(p["speed"] == 3.0);
  }
}
