#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace drivesim {

/// Deterministic random stream. Everything above the raw 64-bit engine
/// (uniform doubles, normals, index choice) is implemented here rather than
/// through <random> distributions, whose outputs differ between standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream keyed by (root seed, purpose, entity, generation).
  /// Adding entities never perturbs the streams of existing ones.
  static Rng substream(std::uint64_t root_seed, std::string_view purpose, std::uint64_t entity,
                       std::uint64_t generation = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; pairs are cached.
  double normal();

  /// Uniform in [0, n) without modulo bias.
  std::uint64_t index(std::uint64_t n);

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace drivesim
