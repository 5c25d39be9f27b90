#include "qct/random.hpp"

#include <cmath>
#include <numbers>

namespace qct {
namespace {

__extension__ using Uint128 = unsigned __int128;

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform in (0, 1].
inline double to_unit_open_low(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

inline Philox4x32::Block counter_of(std::uint64_t counter, std::uint64_t stream) {
  return {static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block ctr) const noexcept {
  std::uint32_t k0 = key_[0];
  std::uint32_t k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

std::array<double, 2> NormalStream::pair(std::uint64_t counter) const noexcept {
  const auto r = gen_(counter_of(counter, stream_));
  const double u1 = to_unit_open_low(r[0], r[1]);
  const double u2 = to_unit_open_low(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void NormalStream::fill(std::uint64_t first, std::span<double> out) const noexcept {
  std::size_t i = 0;
  std::uint64_t index = first;
  if (index % 2 == 1 && i < out.size()) {
    out[i++] = pair(index / 2)[1];
    ++index;
  }
  for (; i + 1 < out.size(); i += 2, index += 2) {
    const auto p = pair(index / 2);
    out[i] = p[0];
    out[i + 1] = p[1];
  }
  if (i < out.size()) out[i] = pair(index / 2)[0];
}

double NormalStream::at(std::uint64_t index) const noexcept {
  return pair(index / 2)[index % 2];
}

std::uint64_t Xoshiro256::below(std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<Uint128>((*this)()) * bound) >> 64);
}

}  // namespace qct
