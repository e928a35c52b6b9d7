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

#ifndef GRSK_SERIALIZATION_HPP_
#define GRSK_SERIALIZATION_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/crc.hpp>

#include "grsk/error.hpp"
#include "grsk/sketch.hpp"

namespace grsk {

using AnySketch = std::variant<PcsaSketch, LogLogSketch>;

inline AnySketch new_sketch(SketchKind kind, std::uint32_t m, SmoothingMode smoothing, std::uint64_t seed) {
  if (kind == SketchKind::pcsa) return PcsaSketch(m, smoothing, seed);
  return LogLogSketch(m, smoothing, seed);
}

inline SketchKind kind_of(const AnySketch& s) {
  return std::holds_alternative<PcsaSketch>(s) ? SketchKind::pcsa : SketchKind::loglog;
}

/// Merges sketches of the same kind; mismatched kinds are incompatible.
inline AnySketch merge(const AnySketch& a, const AnySketch& b) {
  if (a.index() != b.index()) detail::fail(ErrorCode::incompatible_sketch, "sketches differ in kind");
  return std::visit(
      [&](const auto& lhs) -> AnySketch {
        using T = std::decay_t<decltype(lhs)>;
        return merge(lhs, std::get<T>(b));
      },
      a);
}

// Binary layout, little-endian, no padding:
//   0  magic "GRSK"        4
//   4  version u8 = 1      1
//   5  kind u8             1   0 = pcsa, 1 = loglog
//   6  smoothing u8        1   0 = none, 1 = random, 2 = uniform
//   7  reserved u8 = 0     1
//   8  m u32               4
//  12  seed u64            8
//  20  offset_seed u64     8   0 unless smoothing = random
//  28  payload                 loglog: m register bytes (0 = EMPTY); pcsa: m x u64 bitmaps
//   .  crc32 u32           4   CRC-32 (IEEE) of all preceding bytes
namespace wire {

inline constexpr std::array<char, 4> kMagic{'G', 'R', 'S', 'K'};
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 28;
inline constexpr std::size_t kCrcSize = 4;

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[pos + b]) << (8 * b);
  return v;
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[pos + b]) << (8 * b);
  return v;
}

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

[[noreturn]] inline void corrupt(const std::string& what, std::size_t offset) {
  throw Error(ErrorCode::corrupt_sketch, what + " at byte " + std::to_string(offset), offset);
}

inline void put_header(std::vector<std::uint8_t>& out, SketchKind kind, const OffsetVector& offsets,
                       std::uint32_t m, std::uint64_t seed) {
  for (char c : kMagic) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(kind));
  out.push_back(static_cast<std::uint8_t>(offsets.mode()));
  out.push_back(0);
  put_u32(out, m);
  put_u64(out, seed);
  put_u64(out, offsets.offset_seed());
}

}  // namespace wire

inline std::vector<std::uint8_t> serialize(const LogLogSketch& s) {
  detail::require(s.clamp_max() == LogLogSketch::kDefaultClampMax,
                  "only sketches with the default clamp_max are serializable");
  std::vector<std::uint8_t> out;
  out.reserve(wire::kHeaderSize + s.m() + wire::kCrcSize);
  wire::put_header(out, SketchKind::loglog, s.offsets(), s.m(), s.seed());
  out.insert(out.end(), s.registers().begin(), s.registers().end());
  wire::put_u32(out, wire::crc32(out));
  return out;
}

inline std::vector<std::uint8_t> serialize(const PcsaSketch& s) {
  std::vector<std::uint8_t> out;
  out.reserve(wire::kHeaderSize + 8 * static_cast<std::size_t>(s.m()) + wire::kCrcSize);
  wire::put_header(out, SketchKind::pcsa, s.offsets(), s.m(), s.seed());
  for (std::uint64_t bits : s.bitmaps()) wire::put_u64(out, bits);
  wire::put_u32(out, wire::crc32(out));
  return out;
}

inline std::vector<std::uint8_t> serialize(const AnySketch& s) {
  return std::visit([](const auto& sk) { return serialize(sk); }, s);
}

inline AnySketch deserialize(std::span<const std::uint8_t> bytes) {
  using namespace wire;
  if (bytes.size() < 4) corrupt("truncated magic", bytes.size());
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) corrupt("bad magic", 0);
  if (bytes.size() < kHeaderSize) corrupt("truncated header", bytes.size());
  if (bytes[4] != kVersion) corrupt("unsupported version " + std::to_string(bytes[4]), 4);
  if (bytes[5] > 1) corrupt("unknown sketch kind", 5);
  if (bytes[6] > 2) corrupt("unknown smoothing mode", 6);
  if (bytes[7] != 0) corrupt("nonzero reserved byte", 7);

  const auto kind = static_cast<SketchKind>(bytes[5]);
  const auto mode = static_cast<SmoothingMode>(bytes[6]);
  const std::uint32_t m = get_u32(bytes, 8);
  if (m == 0 || m > kMaxSubsketches) corrupt("m out of range", 8);
  const std::uint64_t seed = get_u64(bytes, 12);
  const std::uint64_t offset_seed = get_u64(bytes, 20);
  if (mode != SmoothingMode::random && offset_seed != 0) corrupt("offset_seed set without random smoothing", 20);

  const std::size_t payload = kind == SketchKind::loglog ? m : 8 * static_cast<std::size_t>(m);
  const std::size_t expected = kHeaderSize + payload + kCrcSize;
  if (bytes.size() < expected) corrupt("truncated payload", bytes.size());
  if (bytes.size() > expected) corrupt("trailing bytes", expected);

  const std::size_t crc_pos = expected - kCrcSize;
  if (crc32(bytes.first(crc_pos)) != get_u32(bytes, crc_pos)) corrupt("checksum mismatch", crc_pos);

  auto offsets = OffsetVector::from_offset_seed(mode, m, offset_seed);
  if (kind == SketchKind::loglog) {
    LogLogSketch s(std::move(offsets), seed);
    for (std::uint32_t i = 0; i < m; ++i) {
      const std::uint8_t r = bytes[kHeaderSize + i];
      if (r > LogLogSketch::kDefaultClampMax) corrupt("register out of range", kHeaderSize + i);
      s.set_register(i, r);
    }
    return s;
  }
  PcsaSketch s(std::move(offsets), seed);
  for (std::uint32_t i = 0; i < m; ++i) s.set_bitmap(i, get_u64(bytes, kHeaderSize + 8 * static_cast<std::size_t>(i)));
  return s;
}

}  // namespace grsk

#endif  // GRSK_SERIALIZATION_HPP_
