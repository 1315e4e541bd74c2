#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drivesim/net/protocol.hpp"

namespace testing {

std::filesystem::path source_dir() { return DRIVESIM_SOURCE_DIR; }

std::filesystem::path scenario_path(const std::string& name) { return source_dir() / "scenarios" / name; }

drivesim::Scenario load_fixture(const std::string& name) { return drivesim::load_scenario(scenario_path(name)); }

std::string city_block_with_cameras(int n) {
  std::istringstream in(read_file(scenario_path("city_block.yaml")));
  std::string out, line;
  while (std::getline(in, line)) {
    if (line.find("kind: camera_rgb") == std::string::npos) out += line + "\n";
  }
  for (int i = 0; i < n; ++i) out += "  - {id: cam" + std::to_string(i) + ", kind: camera_rgb, rate_hz: 10}\n";
  return out;
}

std::string golden(const std::string& name, const std::string& actual) {
  const auto path = source_dir() / "tests" / "golden" / name;
  if (std::getenv("DRIVESIM_REGEN_GOLDEN")) write_file(path, actual);
  if (!std::filesystem::exists(path)) return "missing golden file " + path.string();
  const std::string want = read_file(path);
  if (want == actual) return "";
  std::size_t i = 0;
  while (i < want.size() && i < actual.size() && want[i] == actual[i]) ++i;
  return name + " differs at byte " + std::to_string(i);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(DRIVESIM_BINARY_DIR) / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::string validate_schema(const std::filesystem::path& schema, const std::filesystem::path& instance) {
  const auto out = std::filesystem::path(instance).concat(".validation");
  const std::string cmd = "python3 \"" + (source_dir() / "tests" / "tools" / "validate_json.py").string() + "\" \"" +
                          schema.string() + "\" \"" + instance.string() + "\" > \"" + out.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  std::string text = std::filesystem::exists(out) ? read_file(out) : "";
  std::filesystem::remove(out);
  if (rc == 0) return "";
  return text.empty() ? "validator exited with " + std::to_string(rc) : text;
}

void MemorySink::deliver_text(std::string text) {
  if (stalled_) pending_ += text.size();
  std::lock_guard lock(mu_);
  items_.push_back({false, std::move(text)});
}

void MemorySink::deliver_binary(std::shared_ptr<const std::string> bytes) {
  if (stalled_) pending_ += bytes->size();
  std::lock_guard lock(mu_);
  items_.push_back({true, *bytes});
}

std::vector<MemorySink::Item> MemorySink::items() const {
  std::lock_guard lock(mu_);
  return items_;
}

std::vector<nlohmann::json> MemorySink::texts() const {
  std::vector<nlohmann::json> out;
  for (const auto& i : items()) {
    if (!i.binary) out.push_back(nlohmann::json::parse(i.data));
  }
  return out;
}

std::string MemorySink::transcript() const {
  std::string out;
  for (const auto& i : items()) {
    if (i.binary) {
      out += "binary " + std::to_string(i.data.size()) + " " +
             drivesim::net::base64_encode(std::span<const std::uint8_t>(
                 reinterpret_cast<const std::uint8_t*>(i.data.data()), i.data.size())) +
             "\n";
    } else {
      out += i.data + "\n";
    }
  }
  return out;
}

void MemorySink::clear() {
  std::lock_guard lock(mu_);
  items_.clear();
}

}  // namespace testing
