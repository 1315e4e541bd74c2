#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace drivesim {

struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  std::vector<std::uint8_t> data;
};

/// Lossless PNG with fixed compression settings and no time chunk, so equal
/// pixels always give equal bytes. Throws std::runtime_error with the path.
void write_png(const std::filesystem::path& path, int width, int height, int channels,
               std::span<const std::uint8_t> data);

Image read_png(const std::filesystem::path& path);

}  // namespace drivesim
