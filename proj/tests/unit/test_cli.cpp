#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Result run_tool(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = quote(DRIVESIM_TOOL) + " " + args + " >" + quote(out.string()) + " 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing::read_file(out);
  r.err = testing::read_file(err);
  return r;
}

std::string city_block() { return quote(testing::scenario_path("city_block.yaml").string()); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate reports the scenario hash") {
    const auto dir = testing::scratch_dir("cli_validate");
    const auto r = run_tool("validate " + city_block(), dir);
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["valid"] == true);
    CHECK(j["scenario_hash"] == testing::load_fixture("city_block.yaml").hash);
  }

  TEST_CASE("an invalid scenario exits 1 with a message") {
    const auto dir = testing::scratch_dir("cli_invalid");
    testing::write_file(dir / "bad.yaml", "seed: 1\nmap: {waypoints: [{id: 1, x: 0, y: 0, successors: [7]}]}\n");
    const auto r = run_tool("validate " + quote((dir / "bad.yaml").string()), dir);
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK(run_tool("validate " + quote((dir / "missing.yaml").string()), dir).code == 1);
  }

  TEST_CASE("usage errors exit 2") {
    const auto dir = testing::scratch_dir("cli_usage");
    CHECK(run_tool("", dir).code == 2);
    CHECK(run_tool("frobnicate", dir).code == 2);
    CHECK(run_tool("record " + city_block(), dir).code == 2);  // --out is required
    CHECK(run_tool("serve " + city_block() + " --mode warp", dir).code == 2);
    CHECK(run_tool("label-export " + city_block() + " --out x --ticks 1 --classes unicorn", dir).code == 2);
    CHECK(run_tool("--help", dir).code == 0);
  }

  TEST_CASE("label-export writes one schema-valid label file per camera tick") {
    const auto dir = testing::scratch_dir("cli_labels");
    const auto out = dir / "labels_out";
    const auto r = run_tool("label-export " + city_block() + " --out " + quote(out.string()) + " --ticks 100", dir);
    REQUIRE(r.code == 0);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(out / "labels")) files.push_back(e.path());
    CHECK(files.size() == 10);
    for (const auto& f : files) {
      CHECK(testing::validate_schema(testing::source_dir() / "docs/labels.schema.json", f) == "");
    }
    std::size_t images = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out / "images")) ++images;
    CHECK(images == 10);
  }

  TEST_CASE("record then replay; a tampered dataset exits 3") {
    const auto dir = testing::scratch_dir("cli_record");
    const auto ds = dir / "ds";
    testing::write_file(dir / "cmds.jsonl", "{\"tick\": 5, \"vehicle\": 0, \"throttle\": 0.6, \"brake\": 0, \"steer\": 0.1}\n"
                                            "{\"tick\": 80, \"vehicle\": 0, \"throttle\": 0, \"brake\": 0.5, \"steer\": 0}\n");
    const auto rec = run_tool("record " + city_block() + " --out " + quote(ds.string()) +
                                  " --ticks 200 --mode fast --no-server --commands " + quote((dir / "cmds.jsonl").string()),
                              dir);
    REQUIRE(rec.code == 0);
    const auto report = nlohmann::json::parse(rec.out);
    CHECK(report["ticks"] == 200);

    const auto ok = run_tool("replay " + quote(ds.string()), dir);
    CHECK(ok.code == 0);
    CHECK(nlohmann::json::parse(ok.out)["samples_checked"] == 20);

    std::ifstream is(ds / "samples.jsonl");
    std::string text, line;
    for (int i = 0; std::getline(is, line); ++i) {
      if (i == 7) {
        auto j = nlohmann::json::parse(line);
        j["observation"]["sha256"] = std::string(64, 'f');
        line = j.dump();
      }
      text += line + "\n";
    }
    is.close();
    testing::write_file(ds / "samples.jsonl", text);
    const auto bad = run_tool("replay " + quote(ds.string()), dir);
    CHECK(bad.code == 3);
    CHECK(nlohmann::json::parse(bad.out)["divergent_tick"] == 70);
  }

  TEST_CASE("replay of a missing dataset exits 1") {
    const auto dir = testing::scratch_dir("cli_missing");
    CHECK(run_tool("replay " + quote((dir / "nothing").string()), dir).code == 1);
  }
}
