#include "corpsim/hash.hpp"

#include <cstdio>

namespace corpsim {

std::uint64_t hash_tokens(std::span<const std::string> tokens) noexcept {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : tokens) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace corpsim
