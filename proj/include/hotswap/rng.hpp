// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string_view>

namespace hotswap {

// Named deterministic random stream. Each stream is seeded from the run seed
// combined with an FNV-1a hash of its name, so adding or removing one stream
// never perturbs the values drawn by another.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    state_ = seed ^ h;
    // burn-in so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [-half_width, +half_width]
  double next_symmetric(double half_width) {
    return (2.0 * next_unit() - 1.0) * half_width;
  }

 private:
  std::uint64_t state_;
};

}  // namespace hotswap
