#pragma once

#include <cstdint>
#include <string_view>

namespace ckforge {

// SplitMix64; small, seedable, and stable across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // uniform in [lo, hi]
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  std::int64_t uniform_signed(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s, std::uint64_t seed = 0);

}  // namespace ckforge
