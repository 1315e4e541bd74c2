#include <doctest.h>

#include <fstream>

#include "drivesim/png_io.hpp"
#include "drivesim/simulation.hpp"
#include "fixtures.hpp"

using namespace drivesim;

namespace {

std::filesystem::path record(const std::string& name, std::uint64_t ticks, std::uint64_t start = 0) {
  const auto dir = testing::scratch_dir(name) / "ds";
  Simulation sim(testing::load_fixture("city_block.yaml"));
  for (std::uint64_t k = 0; k < start; ++k) sim.step({{0, {0.4, 0, 0.1}}});
  RecordingSession rec(sim, dir);
  for (std::uint64_t k = start; k < ticks; ++k) {
    std::map<VehicleId, dyn::ControlInput> cmd;
    if (k % 50 == 0) cmd[0] = {0.2 + 0.001 * static_cast<double>(k % 300), 0, k % 100 == 0 ? 0.2 : -0.1};
    rec.after_step(sim.step(cmd));
  }
  rec.stop();
  REQUIRE_FALSE(rec.error());
  return dir;
}

std::vector<std::string> lines(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("png round-trips and is byte-stable") {
    const auto dir = testing::scratch_dir("png");
    std::vector<std::uint8_t> rgb(7 * 5 * 3);
    for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = static_cast<std::uint8_t>(i * 37);
    write_png(dir / "a.png", 7, 5, 3, rgb);
    write_png(dir / "b.png", 7, 5, 3, rgb);
    const auto img = read_png(dir / "a.png");
    CHECK(img.width == 7);
    CHECK(img.height == 5);
    CHECK(img.channels == 3);
    CHECK(img.data == rgb);
    CHECK(testing::read_file(dir / "a.png") == testing::read_file(dir / "b.png"));
    std::vector<std::uint8_t> gray(4 * 4, 9);
    write_png(dir / "g.png", 4, 4, 1, gray);
    CHECK(read_png(dir / "g.png").data == gray);
    CHECK_THROWS_AS(read_png(dir / "missing.png"), std::runtime_error);
  }

  TEST_CASE("commands round-trip through json") {
    const CommandRecord c{12, 3, {0.25, 0.5, -0.75}};
    CHECK(command_from_json(to_json(c)) == c);
  }

  TEST_CASE("a recording has the documented layout and validates") {
    const auto dir = record("layout", 300);
    for (const char* f : {"scenario.yaml", "commands.jsonl", "samples.jsonl", "manifest.json"}) {
      CHECK(std::filesystem::exists(dir / f));
    }
    const auto m = read_manifest(dir);
    CHECK(m.start_tick == 0);
    CHECK(m.end_tick == 300);
    CHECK(m.sample_count == 30);
    CHECK(m.seed == 42);
    CHECK(m.scenario_hash == testing::load_fixture("city_block.yaml").hash);
    CHECK(testing::read_file(dir / "scenario.yaml") == testing::read_file(testing::scenario_path("city_block.yaml")));

    const auto schemas = testing::source_dir() / "docs";
    CHECK(testing::validate_schema(schemas / "manifest.schema.json", dir / "manifest.json") == "");
    CHECK(testing::validate_schema(schemas / "sample.schema.json", dir / "samples.jsonl") == "");
    CHECK(testing::validate_schema(schemas / "command.schema.json", dir / "commands.jsonl") == "");

    const auto samples = read_samples(dir);
    REQUIRE(samples.size() == 30);
    CHECK(samples[3].at("tick") == 30);
    const auto frame = samples[3].at("frames").at(0).get<std::string>();
    CHECK(frame == "frames/cam/0000000030.png");
    const auto img = read_png(dir / frame);
    CHECK(img.width == 320);
    CHECK(img.height == 640);
    CHECK(img.channels == 3);
    CHECK(samples[3].at("observation").at("C_shape") == nlohmann::json::array({640, 320, 3}));
  }

  TEST_CASE("replay reproduces every observation hash") {
    const auto dir = record("replay", 400);
    const auto r = replay_dataset(dir);
    CHECK(r.ok);
    CHECK(r.samples_checked == 40);
  }

  TEST_CASE("a recording started mid-run replays from tick 0") {
    const auto dir = record("midrun", 350, 120);
    const auto m = read_manifest(dir);
    CHECK(m.start_tick == 120);
    CHECK(read_commands(dir).front().tick == 0);  // backfilled
    const auto r = replay_dataset(dir);
    CHECK(r.ok);
    CHECK(r.samples_checked == 23);
  }

  TEST_CASE("replay reports the first divergent tick") {
    const auto dir = record("tamper", 300);
    auto ls = lines(dir / "samples.jsonl");
    auto j = nlohmann::json::parse(ls[5]);
    j["observation"]["sha256"] = std::string(64, '0');
    ls[5] = j.dump();
    std::string text;
    for (const auto& l : ls) text += l + "\n";
    testing::write_file(dir / "samples.jsonl", text);
    const auto r = replay_dataset(dir);
    CHECK_FALSE(r.ok);
    REQUIRE(r.divergent_tick);
    CHECK(*r.divergent_tick == 50);

    const auto dir2 = record("tamper_cmd", 300);
    auto cl = lines(dir2 / "commands.jsonl");
    auto c = nlohmann::json::parse(cl[2]);
    c["steer"] = 0.9;
    cl[2] = c.dump();
    text.clear();
    for (const auto& l : cl) text += l + "\n";
    testing::write_file(dir2 / "commands.jsonl", text);
    const auto r2 = replay_dataset(dir2);
    CHECK_FALSE(r2.ok);
    REQUIRE(r2.divergent_tick);
    // First sample at or after the edited command; V carries the applied action.
    const auto t = c["tick"].get<std::uint64_t>();
    CHECK(*r2.divergent_tick == (t + 9) / 10 * 10);
  }

  TEST_CASE("an unwritable directory is reported, not fatal") {
    const auto dir = testing::scratch_dir("unwritable");
    testing::write_file(dir / "file", "x");
    CHECK_THROWS_AS(DatasetRecorder(dir / "file" / "ds", testing::load_fixture("city_block.yaml"), 0.01, 0),
                    std::runtime_error);
  }
}
