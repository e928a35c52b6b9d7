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

#ifndef GRSK_ESTIMATORS_HPP_
#define GRSK_ESTIMATORS_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grsk/analysis.hpp"
#include "grsk/error.hpp"
#include "grsk/serialization.hpp"
#include "grsk/sketch.hpp"

namespace grsk {

enum class EstimatorId { tau_gra, df, ffgm, lang, fm };

inline const char* to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::tau_gra: return "tau-gra";
    case EstimatorId::df: return "df";
    case EstimatorId::ffgm: return "ffgm";
    case EstimatorId::lang: return "lang";
    case EstimatorId::fm: return "fm";
  }
  return "unknown";
}

inline EstimatorId parse_estimator(std::string_view s) {
  if (s == "tau-gra") return EstimatorId::tau_gra;
  if (s == "df") return EstimatorId::df;
  if (s == "ffgm") return EstimatorId::ffgm;
  if (s == "lang") return EstimatorId::lang;
  if (s == "fm") return EstimatorId::fm;
  detail::fail(ErrorCode::invalid_parameter, "unknown estimator '" + std::string(s) + "'");
}

struct Estimate {
  double lambda_hat = 0.0;
  EstimatorId estimator = EstimatorId::tau_gra;
  std::optional<double> tau;
  std::uint32_t m = 0;
  bool low_confidence = false;
};

struct EstimateOptions {
  /// Treat EMPTY LogLog registers as X = 0 (the whole column free) instead of refusing.
  bool treat_empty_as_zero = false;
};

/// Multiplier of m 2^{mean(ones) + mean(R)} in the coupon-collector estimator: e^{-gamma} sqrt(2).
inline const double kLangConstant = std::exp(-kEulerGamma) * std::numbers::sqrt2;

/// Multiplier of m 2^{mean(z) + mean(R)} in the first-zero estimator, z counted from cell 1.
/// Calibrated by scripts/calibrate_fm.sh: 10^4 Poissonized trials, m = 1024, uniform offsets, seed 0.
inline constexpr double kFmConstant = 0.646265;

/// PCSA subsketch on the infinite board: cell base + k is occupied iff bit k is set,
/// cells below base are occupied, cells at or above base + 64 are free.
/// A streaming bitmap is the column with base 1.
struct PcsaColumn {
  int base = 1;
  std::uint64_t bits = 0;

  /// Occupied cells counted from index 1: ones at j >= 1 minus free cells at j <= 0.
  int ones() const noexcept { return std::popcount(bits) + base - 1; }

  /// Index of the lowest free cell.
  int first_zero() const noexcept { return base + std::countr_one(bits); }

  friend bool operator==(const PcsaColumn&, const PcsaColumn&) = default;
};

// ---------------------------------------------------------------------------
// Board-level kernels. These work on any register / column view and are shared
// by the streaming sketches and the Poissonized simulator.
// ---------------------------------------------------------------------------

/// (1/m) sum_i 2^{-tau (R_i + X_i)}.
inline double loglog_gra(std::span<const double> offsets, std::span<const int> x, double tau) {
  detail::check_tau_open(tau);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::exp2(-tau * (offsets[i] + x[i]));
  return sum / static_cast<double>(x.size());
}

/// m C_tau ((1/m) sum_i 2^{-tau (R_i + X_i)})^{-1/tau}, evaluated relative to min(R_i + X_i)
/// so extreme taus neither underflow nor overflow.
inline double loglog_tau_estimate(std::span<const double> offsets, std::span<const int> x, double tau) {
  detail::check_tau_open(tau);
  const std::size_t m = x.size();
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) lowest = std::min(lowest, offsets[i] + x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += std::exp2(-tau * (offsets[i] + x[i] - lowest));
  const double dm = static_cast<double>(m);
  return dm * std::exp(log_loglog_bias_constant(tau) + lowest * kLn2 - std::log(sum / dm) / tau);
}

/// Geometric-mean (tau -> 0) estimator: m e^{-gamma} / sqrt(2) 2^{mean(R_i + X_i)}.
inline double loglog_df_estimate(std::span<const double> offsets, std::span<const int> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += offsets[i] + x[i];
  const double dm = static_cast<double>(x.size());
  return dm * std::exp(-kEulerGamma) / std::numbers::sqrt2 * std::exp2(sum / dm);
}

namespace detail {

// Sum of 2^{-tau (j + R - shift)} over the free cells of one column, tail included.
struct PcsaGraTable {
  explicit PcsaGraTable(double tau) : tau(tau), tail(1.0 / -std::expm1(-tau * kLn2)) {
    const double q = std::exp2(-tau);
    double p = 1.0;
    for (auto& v : powers) {
      v = p;
      p *= q;
    }
  }

  double column(const PcsaColumn& col, double offset, double shift) const {
    const double scale = std::exp2(-tau * (col.base + offset - shift));
    double sum = 0.0;
    for (std::uint64_t free = ~col.bits; free != 0; free &= free - 1) sum += powers[std::countr_zero(free)];
    // cells base + 64 and up: q^64 / (1 - q)
    sum += std::exp2(-tau * 64.0) * tail;
    return scale * sum;
  }

  double tau;
  double tail;
  std::array<double, 64> powers{};
};

}  // namespace detail

/// Total PCSA tau-GRA: sum over subsketches and free cells of 2^{-tau (j + R_i)}.
inline double pcsa_gra(std::span<const double> offsets, std::span<const PcsaColumn> columns, double tau) {
  detail::check_tau_open(tau);
  const detail::PcsaGraTable table(tau);
  double total = 0.0;
  for (std::size_t i = 0; i < columns.size(); ++i) total += table.column(columns[i], offsets[i], 0.0);
  return total;
}

/// m (Gamma(tau) / ln 2)^{1/tau} (A / m)^{-1/tau}, evaluated in log space relative to the
/// lowest free cell.
inline double pcsa_tau_estimate(std::span<const double> offsets, std::span<const PcsaColumn> columns, double tau) {
  detail::check_tau_open(tau);
  const std::size_t m = columns.size();
  double shift = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) shift = std::min(shift, columns[i].first_zero() + offsets[i]);
  const detail::PcsaGraTable table(tau);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += table.column(columns[i], offsets[i], shift);
  const double dm = static_cast<double>(m);
  return dm * std::exp(log_pcsa_bias_constant(tau) + shift * kLn2 - std::log(total / dm) / tau);
}

/// Coupon-collector estimator: kLangConstant m 2^{mean(ones) + mean(R)}.
inline double pcsa_lang_estimate(std::span<const double> offsets, std::span<const PcsaColumn> columns) {
  double sum = 0.0;
  for (std::size_t i = 0; i < columns.size(); ++i) sum += columns[i].ones() + offsets[i];
  const double dm = static_cast<double>(columns.size());
  return kLangConstant * dm * std::exp2(sum / dm);
}

/// First-zero estimator: kappa m 2^{mean(z) + mean(R)}.
inline double pcsa_fm_estimate(std::span<const double> offsets, std::span<const PcsaColumn> columns,
                               double kappa = kFmConstant) {
  double sum = 0.0;
  for (std::size_t i = 0; i < columns.size(); ++i) sum += columns[i].first_zero() + offsets[i];
  const double dm = static_cast<double>(columns.size());
  return kappa * dm * std::exp2(sum / dm);
}

/// Inverts a LogLog mean statistic (1/m) sum 2^{-tau (R_i + X_i)} into a cardinality estimate.
inline double loglog_lambda_from_gra(double mean_gra, std::uint32_t m, double tau) {
  return m * std::exp(log_loglog_bias_constant(tau) - std::log(mean_gra) / tau);
}

/// Inverts a total PCSA tau-GRA into a cardinality estimate.
inline double pcsa_lambda_from_gra(double total_gra, std::uint32_t m, double tau) {
  return m * std::exp(log_pcsa_bias_constant(tau) - std::log(total_gra / m) / tau);
}

// ---------------------------------------------------------------------------
// Sketch-level operations.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> loglog_values(const LogLogSketch& s, const EstimateOptions& opts) {
  if (s.is_empty()) fail(ErrorCode::empty_sketch, "no element has been inserted");
  if (!opts.treat_empty_as_zero && s.empty_count() > 0) {
    fail(ErrorCode::empty_sketch,
         std::to_string(s.empty_count()) + " of " + std::to_string(s.m()) + " registers are EMPTY");
  }
  return {s.registers().begin(), s.registers().end()};  // EMPTY == 0 == X
}

inline std::vector<PcsaColumn> pcsa_columns(const PcsaSketch& s) {
  std::vector<PcsaColumn> cols(s.m());
  for (std::uint32_t i = 0; i < s.m(); ++i) cols[i].bits = s.bitmaps()[i];
  return cols;
}

inline double finite_or_fail(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::numerical_failure, "estimate is not finite");
  return v;
}

}  // namespace detail

inline double gra_loglog(const LogLogSketch& s, double tau, const EstimateOptions& opts = {}) {
  detail::check_tau_open(tau);
  const auto x = detail::loglog_values(s, opts);
  return loglog_gra(s.offsets().values(), x, tau);
}

inline double gra_pcsa(const PcsaSketch& s, double tau) {
  detail::check_tau_open(tau);
  const auto cols = detail::pcsa_columns(s);
  return pcsa_gra(s.offsets().values(), cols, tau);
}

inline Estimate estimate_loglog_gra(const LogLogSketch& s, double tau, const EstimateOptions& opts = {}) {
  detail::check_tau_open(tau);
  const auto x = detail::loglog_values(s, opts);
  return Estimate{detail::finite_or_fail(loglog_tau_estimate(s.offsets().values(), x, tau)), EstimatorId::tau_gra,
                  tau, s.m()};
}

inline Estimate estimate_ffgm(const LogLogSketch& s, const EstimateOptions& opts = {}) {
  Estimate e = estimate_loglog_gra(s, 1.0, opts);
  e.estimator = EstimatorId::ffgm;
  return e;
}

inline Estimate estimate_df(const LogLogSketch& s, const EstimateOptions& opts = {}) {
  const auto x = detail::loglog_values(s, opts);
  return Estimate{detail::finite_or_fail(loglog_df_estimate(s.offsets().values(), x)), EstimatorId::df, 0.0, s.m()};
}

inline Estimate estimate_pcsa_gra(const PcsaSketch& s, double tau) {
  detail::check_tau_open(tau);
  if (s.is_empty()) detail::fail(ErrorCode::empty_sketch, "no element has been inserted");
  const auto cols = detail::pcsa_columns(s);
  return Estimate{detail::finite_or_fail(pcsa_tau_estimate(s.offsets().values(), cols, tau)), EstimatorId::tau_gra,
                  tau, s.m()};
}

inline Estimate estimate_lang(const PcsaSketch& s) {
  const auto cols = detail::pcsa_columns(s);
  Estimate e{pcsa_lang_estimate(s.offsets().values(), cols), EstimatorId::lang, 0.0, s.m()};
  e.low_confidence = s.is_empty();
  return e;
}

inline Estimate estimate_fm(const PcsaSketch& s) {
  const auto cols = detail::pcsa_columns(s);
  Estimate e{pcsa_fm_estimate(s.offsets().values(), cols), EstimatorId::fm, std::nullopt, s.m()};
  e.low_confidence = s.is_empty();
  return e;
}

/// Applies `id` to a sketch of either kind. tau is used by tau-gra only.
inline Estimate estimate(const AnySketch& sketch, EstimatorId id, double tau, const EstimateOptions& opts = {}) {
  if (const auto* ll = std::get_if<LogLogSketch>(&sketch)) {
    switch (id) {
      case EstimatorId::tau_gra: return estimate_loglog_gra(*ll, tau, opts);
      case EstimatorId::ffgm: return estimate_ffgm(*ll, opts);
      case EstimatorId::df: return estimate_df(*ll, opts);
      default: detail::fail(ErrorCode::invalid_parameter, std::string(to_string(id)) + " needs a pcsa sketch");
    }
  }
  const auto& pc = std::get<PcsaSketch>(sketch);
  switch (id) {
    case EstimatorId::tau_gra: return estimate_pcsa_gra(pc, tau);
    case EstimatorId::lang: return estimate_lang(pc);
    case EstimatorId::fm: return estimate_fm(pc);
    default: detail::fail(ErrorCode::invalid_parameter, std::string(to_string(id)) + " needs a loglog sketch");
  }
}

}  // namespace grsk

#endif  // GRSK_ESTIMATORS_HPP_
