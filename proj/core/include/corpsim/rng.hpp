#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace corpsim {

/// Seeded generator with portable derived distributions.
///
/// std::mt19937_64's output sequence is fixed by the standard, but the
/// <random> distributions are not, so bounded integers and unit reals are
/// derived here to keep results identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent sub-seed for a named purpose, so adding a new
/// consumer of randomness never shifts the streams of existing ones.
std::uint64_t subseed(std::uint64_t seed, std::string_view purpose) noexcept;

}  // namespace corpsim
