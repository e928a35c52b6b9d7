/*
 * Copyright 2026 The grsk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRSK_HASHING_HPP_
#define GRSK_HASHING_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string_view>

#include "grsk/error.hpp"

namespace grsk {

inline constexpr std::uint32_t kMaxSubsketches = 1u << 20;

/// Number of fraction bits used for the vertical dart coordinate.
inline constexpr int kFractionBits = 44;

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded 64-bit hash of a byte sequence.
///
/// Construction (kept fixed so golden vectors stay portable):
///   h = mix64(seed + 0x9e3779b97f4a7c15 * (len + 1))
///   for each full 8-byte little-endian word w:   h = mix64(h ^ w)
///   if 1..7 bytes remain, packed little-endian into w:
///                                                h = mix64(h ^ w ^ (rem << 59))
inline std::uint64_t hash64(std::span<const std::byte> key, std::uint64_t seed) noexcept {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  const std::size_t len = key.size();
  std::uint64_t h = mix64(seed + golden * (static_cast<std::uint64_t>(len) + 1));
  std::size_t pos = 0;
  for (; pos + 8 <= len; pos += 8) {
    std::uint64_t w = 0;
    for (int b = 0; b < 8; ++b) w |= static_cast<std::uint64_t>(key[pos + b]) << (8 * b);
    h = mix64(h ^ w);
  }
  const std::size_t rem = len - pos;
  if (rem > 0) {
    std::uint64_t w = 0;
    for (std::size_t b = 0; b < rem; ++b) w |= static_cast<std::uint64_t>(key[pos + b]) << (8 * b);
    h = mix64(h ^ w ^ (static_cast<std::uint64_t>(rem) << 59));
  }
  return h;
}

inline std::uint64_t hash64(std::string_view key, std::uint64_t seed) noexcept {
  return hash64(std::as_bytes(std::span<const char>(key.data(), key.size())), seed);
}

/// Hash of a 64-bit integer encoded as 8 little-endian bytes.
inline std::uint64_t hash64(std::uint64_t key, std::uint64_t seed) noexcept {
  std::byte bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<std::byte>((key >> (8 * b)) & 0xff);
  return hash64(std::span<const std::byte>(bytes, 8), seed);
}

/// Seed for an independent sub-stream (per-trial seeds, offset streams).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return hash64(index, master);
}

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

/// One hashed element: the subsketch it lands in and its vertical coordinate
/// u = -log2(v), v in (0, 1].
struct HashedItem {
  std::uint32_t bucket = 0;
  double u = 0.0;
  std::uint64_t raw = 0;

  friend bool operator==(const HashedItem&, const HashedItem&) = default;
};

/// Splits a 64-bit hash into a bucket in [0, m) and a dart height.
///
/// The 128-bit product h * m is used as a multiply-shift reduction: the high
/// word is the bucket (bias at most m / 2^64), and the top 44 bits t of the low
/// word are uniform and independent of the bucket for any m <= 2^20. The height
/// is v = 1 - t / 2^44, so t = 0 maps to v = 1 and v = 0 cannot occur.
inline HashedItem split(std::uint64_t h, std::uint32_t m) {
  if (m == 0 || m > kMaxSubsketches) {
    detail::fail(ErrorCode::invalid_parameter, "m must lie in [1, 2^20]");
  }
  const unsigned __int128 product = static_cast<unsigned __int128>(h) * m;
  const auto bucket = static_cast<std::uint32_t>(product >> 64);
  const auto low = static_cast<std::uint64_t>(product);
  const std::uint64_t t = low >> (64 - kFractionBits);
  const double v = static_cast<double>((std::uint64_t{1} << kFractionBits) - t) * 0x1.0p-44;
  return HashedItem{bucket, 0.0 - std::log2(v), h};
}

/// Index j of the smoothed cell (2^{-j-R}, 2^{-(j-1)-R}] containing the dart,
/// i.e. floor(u - R) + 1. May be <= 0 when u < R.
inline int cell_index(double u, double offset) noexcept {
  return static_cast<int>(std::floor(u - offset)) + 1;
}

}  // namespace grsk

#endif  // GRSK_HASHING_HPP_
