#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "drivesim/net/broker.hpp"
#include "drivesim/scenario.hpp"

namespace testing {

std::filesystem::path source_dir();
std::filesystem::path scenario_path(const std::string& name);
drivesim::Scenario load_fixture(const std::string& name);

/// city_block with its camera replaced by `n` default-size rgb cameras
/// cam0..cam{n-1}, all at 10 Hz.
std::string city_block_with_cameras(int n);

/// Compares `actual` with tests/golden/<name>; returns "" on a match. With
/// DRIVESIM_REGEN_GOLDEN set the file is rewritten first.
std::string golden(const std::string& name, const std::string& actual);

/// Fresh empty directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

/// Validates `instance` against a JSON schema with python3 jsonschema.
/// Returns the validator's error text, empty on success.
std::string validate_schema(const std::filesystem::path& schema, const std::filesystem::path& instance);

/// Broker sink that records everything delivered to it.
class MemorySink : public drivesim::net::Sink {
 public:
  struct Item {
    bool binary = false;
    std::string data;
  };

  void deliver_text(std::string text) override;
  void deliver_binary(std::shared_ptr<const std::string> bytes) override;
  void close() override { closed_ = true; }
  std::size_t pending_bytes() const override { return stalled_ ? pending_.load() : 0; }

  /// While stalled, delivered bytes count as pending.
  void stall(bool on) { stalled_ = on; }
  bool closed() const { return closed_; }

  std::vector<Item> items() const;
  std::vector<nlohmann::json> texts() const;
  /// Every message, one per line; binary frames as "binary <size> <base64>".
  std::string transcript() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<Item> items_;
  std::atomic<std::size_t> pending_{0};
  std::atomic<bool> stalled_{false};
  std::atomic<bool> closed_{false};
};

}  // namespace testing
