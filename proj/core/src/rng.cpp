#include "corpsim/rng.hpp"

#include "corpsim/hash.hpp"

namespace corpsim {

std::uint64_t Rng::uniform(std::uint64_t bound) {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t subseed(std::uint64_t seed, std::string_view purpose) noexcept {
  return mix64(seed ^ fnv1a64(purpose));
}

}  // namespace corpsim
