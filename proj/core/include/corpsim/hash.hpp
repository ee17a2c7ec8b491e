#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace corpsim {

/// 64-bit FNV-1a. Used for subword buckets, content hashes and seed splitting.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// Hash of a token sequence; tokens are separated by a 0x0A byte so that
/// ["ab","c"] and ["a","bc"] differ.
std::uint64_t hash_tokens(std::span<const std::string> tokens) noexcept;

/// Lower-case 16-digit hexadecimal rendering.
std::string hex64(std::uint64_t value);

}  // namespace corpsim
