#pragma once

#include <array>
#include <cstdint>

namespace brwx {

// splitmix64 finalizer; full-avalanche bijection on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// xoshiro256++ with state derived from (master_seed, stream_index).
//
// Each (seed, index) pair hashes to four independent state words, so
// replicate streams never overlap and results do not depend on which
// thread runs which replicate.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0) noexcept {
    const std::uint64_t h =
        mix64(mix64(master_seed) ^ (stream_index * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
    for (int i = 0; i < 4; ++i) {
      s_[i] = mix64(h + static_cast<std::uint64_t>(i + 1) * 0x9E3779B97F4A7C15ULL);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa, offset by half an
  // ulp so 0 and 1 are never returned.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

}  // namespace brwx
