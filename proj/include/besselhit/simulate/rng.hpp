#pragma once

#include <cstdint>
#include <limits>

namespace besselhit {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Substream key for (seed, stream_id, path, lane).
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream_id,
                                          std::uint64_t path, std::uint64_t lane) noexcept {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ stream_id);
  k = splitmix64(k ^ path);
  return splitmix64(k ^ lane);
}

/// xoshiro256++; satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t key) noexcept {
    for (auto& word : s_) {
      key += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = key;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  Xoshiro256(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t path,
             std::uint64_t lane) noexcept
      : Xoshiro256(stream_key(seed, stream_id, path, lane)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
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

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Uniform on the open interval (0, 1).
template <class Rng>
double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace besselhit
