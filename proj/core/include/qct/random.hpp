#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace qct {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every output block is a pure function of (key, counter), so a stream can be
/// split into arbitrary chunks and evaluated in any order or on any thread.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  Block operator()(Block counter) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// SplitMix64 finalizer; used to derive child seeds from (seed, index).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic child seed for substream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

/// Standard-normal variates addressed by (seed, stream, index).
///
/// Value `index` of stream `stream` never depends on how the caller chunks the
/// range, which is what makes threaded sampling reproducible.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : gen_(seed), stream_(stream) {}

  /// Fills `out` with variates [first, first + out.size()).
  void fill(std::uint64_t first, std::span<double> out) const noexcept;

  double at(std::uint64_t index) const noexcept;

 private:
  std::array<double, 2> pair(std::uint64_t counter) const noexcept;

  Philox4x32 gen_;
  std::uint64_t stream_;
};

/// xoshiro256** (Blackman & Vigna), seeded through SplitMix64. Used where one
/// sequential stream per work item is enough, e.g. one bootstrap resample.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    for (auto& word : s_) {
      seed += 0x9E3779B97F4A7C15ULL;
      word = mix64(seed);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Integer in [0, bound) by Lemire's multiply-shift; bias below bound / 2^64.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace qct
