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

#ifndef GRSK_SKETCH_HPP_
#define GRSK_SKETCH_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grsk/error.hpp"
#include "grsk/hashing.hpp"

namespace grsk {

enum class SketchKind : std::uint8_t { pcsa = 0, loglog = 1 };

enum class SmoothingMode : std::uint8_t { none = 0, random = 1, uniform = 2 };

inline const char* to_string(SketchKind kind) { return kind == SketchKind::pcsa ? "pcsa" : "loglog"; }

inline const char* to_string(SmoothingMode mode) {
  switch (mode) {
    case SmoothingMode::none: return "none";
    case SmoothingMode::random: return "random";
    case SmoothingMode::uniform: return "uniform";
  }
  return "unknown";
}

inline SketchKind parse_sketch_kind(std::string_view s) {
  if (s == "pcsa") return SketchKind::pcsa;
  if (s == "loglog") return SketchKind::loglog;
  detail::fail(ErrorCode::invalid_parameter, "unknown sketch kind '" + std::string(s) + "'");
}

inline SmoothingMode parse_smoothing(std::string_view s) {
  if (s == "none") return SmoothingMode::none;
  if (s == "random") return SmoothingMode::random;
  if (s == "uniform") return SmoothingMode::uniform;
  detail::fail(ErrorCode::invalid_parameter, "unknown smoothing mode '" + std::string(s) + "'");
}

inline void check_subsketch_count(std::uint32_t m) {
  if (m == 0 || m > kMaxSubsketches) {
    detail::fail(ErrorCode::invalid_parameter, "m must lie in [1, 2^20], got " + std::to_string(m));
  }
}

/// Per-subsketch cell offsets R_i in [0, 1). Cell j of subsketch i covers the
/// heights (2^{-j-R_i}, 2^{-(j-1)-R_i}].
class OffsetVector {
public:
  OffsetVector() = default;

  /// Offsets for a sketch with the given seed. Random offsets come from a stream
  /// separate from item hashing.
  static OffsetVector make(SmoothingMode mode, std::uint32_t m, std::uint64_t sketch_seed) {
    const std::uint64_t offset_seed =
        mode == SmoothingMode::random ? derive_seed(sketch_seed, kOffsetStreamTag) : 0;
    return from_offset_seed(mode, m, offset_seed);
  }

  static OffsetVector from_offset_seed(SmoothingMode mode, std::uint32_t m, std::uint64_t offset_seed) {
    check_subsketch_count(m);
    OffsetVector out;
    out.mode_ = mode;
    out.offset_seed_ = mode == SmoothingMode::random ? offset_seed : 0;
    out.values_.assign(m, 0.0);
    if (mode == SmoothingMode::uniform) {
      for (std::uint32_t i = 0; i < m; ++i) out.values_[i] = static_cast<double>(i) / static_cast<double>(m);
    } else if (mode == SmoothingMode::random) {
      SplitMix64 rng(offset_seed);
      for (auto& v : out.values_) v = rng.uniform01();
    }
    return out;
  }

  /// Offsets drawn directly from a caller-owned generator (simulation use).
  template <class Rng>
  static OffsetVector sample(SmoothingMode mode, std::uint32_t m, Rng& rng) {
    if (mode != SmoothingMode::random) return from_offset_seed(mode, m, 0);
    OffsetVector out;
    out.mode_ = mode;
    out.values_.resize(m);
    for (auto& v : out.values_) v = rng.uniform01();
    return out;
  }

  SmoothingMode mode() const noexcept { return mode_; }
  std::uint64_t offset_seed() const noexcept { return offset_seed_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double mean() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
  }

  friend bool operator==(const OffsetVector&, const OffsetVector&) = default;

  static constexpr std::uint64_t kOffsetStreamTag = 0x6f66667365747321ULL;  // "offsets!"

private:
  SmoothingMode mode_ = SmoothingMode::none;
  std::uint64_t offset_seed_ = 0;
  std::vector<double> values_;
};

namespace detail {

template <class Sketch>
void check_compatible(const Sketch& a, const Sketch& b) {
  auto mismatch = [](const char* field) {
    fail(ErrorCode::incompatible_sketch, std::string("sketches differ in ") + field);
  };
  if (a.m() != b.m()) mismatch("m");
  if (a.seed() != b.seed()) mismatch("seed");
  if (a.offsets().mode() != b.offsets().mode()) mismatch("smoothing");
  if (a.offsets() != b.offsets()) mismatch("offsets");
}

}  // namespace detail

/// LogLog sketch: one register per subsketch holding the index of the highest
/// occupied cell, or kEmpty when no element has landed in it.
class LogLogSketch {
public:
  static constexpr std::uint8_t kEmpty = 0;
  static constexpr int kDefaultClampMax = 62;

  LogLogSketch(std::uint32_t m, SmoothingMode smoothing, std::uint64_t seed, int clamp_max = kDefaultClampMax)
      : LogLogSketch(OffsetVector::make(smoothing, m, seed), seed, clamp_max) {}

  LogLogSketch(OffsetVector offsets, std::uint64_t seed, int clamp_max = kDefaultClampMax)
      : m_(static_cast<std::uint32_t>(offsets.size())), seed_(seed), clamp_max_(clamp_max),
        offsets_(std::move(offsets)), registers_(m_, kEmpty) {
    check_subsketch_count(m_);
    detail::require(clamp_max >= 1 && clamp_max <= 255, "clamp_max must lie in [1, 255]");
  }

  void insert(std::string_view key) { insert_hash(hash64(key, seed_)); }
  void insert(std::span<const std::byte> key) { insert_hash(hash64(key, seed_)); }
  void insert_hash(std::uint64_t h) { insert_item(split(h, m_)); }

  void insert_item(const HashedItem& item) {
    const int j = std::clamp(cell_index(item.u, offsets_[item.bucket]), 1, clamp_max_);
    auto& reg = registers_[item.bucket];
    if (j > reg) reg = static_cast<std::uint8_t>(j);
  }

  /// Elementwise max; EMPTY (0) is the identity.
  LogLogSketch& merge(const LogLogSketch& other) {
    detail::check_compatible(*this, other);
    if (clamp_max_ != other.clamp_max_) detail::fail(ErrorCode::incompatible_sketch, "sketches differ in clamp_max");
    for (std::uint32_t i = 0; i < m_; ++i) registers_[i] = std::max(registers_[i], other.registers_[i]);
    return *this;
  }

  std::uint32_t m() const noexcept { return m_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int clamp_max() const noexcept { return clamp_max_; }
  const OffsetVector& offsets() const noexcept { return offsets_; }
  std::span<const std::uint8_t> registers() const noexcept { return registers_; }

  /// Raw register write, used by deserialization and tests.
  void set_register(std::uint32_t i, std::uint8_t value) {
    detail::require(i < m_, "register index out of range");
    detail::require(value == kEmpty || value <= clamp_max_, "register value exceeds clamp_max");
    registers_[i] = value;
  }

  bool is_empty() const noexcept {
    return std::all_of(registers_.begin(), registers_.end(), [](std::uint8_t r) { return r == kEmpty; });
  }
  std::size_t empty_count() const noexcept {
    return static_cast<std::size_t>(std::count(registers_.begin(), registers_.end(), kEmpty));
  }

  friend bool operator==(const LogLogSketch&, const LogLogSketch&) = default;

private:
  std::uint32_t m_;
  std::uint64_t seed_;
  int clamp_max_;
  OffsetVector offsets_;
  std::vector<std::uint8_t> registers_;
};

/// PCSA sketch: one 64-bit bitmap per subsketch, bit k-1 set iff cell k is occupied.
class PcsaSketch {
public:
  static constexpr int kCells = 64;

  PcsaSketch(std::uint32_t m, SmoothingMode smoothing, std::uint64_t seed)
      : PcsaSketch(OffsetVector::make(smoothing, m, seed), seed) {}

  PcsaSketch(OffsetVector offsets, std::uint64_t seed)
      : m_(static_cast<std::uint32_t>(offsets.size())), seed_(seed), offsets_(std::move(offsets)), bitmaps_(m_, 0) {
    check_subsketch_count(m_);
  }

  void insert(std::string_view key) { insert_hash(hash64(key, seed_)); }
  void insert(std::span<const std::byte> key) { insert_hash(hash64(key, seed_)); }
  void insert_hash(std::uint64_t h) { insert_item(split(h, m_)); }

  void insert_item(const HashedItem& item) {
    const int j = std::clamp(cell_index(item.u, offsets_[item.bucket]), 1, kCells);
    bitmaps_[item.bucket] |= std::uint64_t{1} << (j - 1);
  }

  PcsaSketch& merge(const PcsaSketch& other) {
    detail::check_compatible(*this, other);
    for (std::uint32_t i = 0; i < m_; ++i) bitmaps_[i] |= other.bitmaps_[i];
    return *this;
  }

  std::uint32_t m() const noexcept { return m_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const OffsetVector& offsets() const noexcept { return offsets_; }
  std::span<const std::uint64_t> bitmaps() const noexcept { return bitmaps_; }

  void set_bitmap(std::uint32_t i, std::uint64_t bits) {
    detail::require(i < m_, "bitmap index out of range");
    bitmaps_[i] = bits;
  }

  bool is_empty() const noexcept {
    return std::all_of(bitmaps_.begin(), bitmaps_.end(), [](std::uint64_t b) { return b == 0; });
  }

  /// Highest occupied cell of subsketch i, 0 if none.
  int highest_cell(std::uint32_t i) const noexcept {
    return bitmaps_[i] == 0 ? 0 : 64 - std::countl_zero(bitmaps_[i]);
  }

  friend bool operator==(const PcsaSketch&, const PcsaSketch&) = default;

private:
  std::uint32_t m_;
  std::uint64_t seed_;
  OffsetVector offsets_;
  std::vector<std::uint64_t> bitmaps_;
};

template <class Sketch>
Sketch merge(Sketch a, const Sketch& b) {
  a.merge(b);
  return a;
}

}  // namespace grsk

#endif  // GRSK_SKETCH_HPP_
