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

#ifndef GRSK_POISSON_SIM_HPP_
#define GRSK_POISSON_SIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "grsk/analysis.hpp"
#include "grsk/error.hpp"
#include "grsk/estimators.hpp"
#include "grsk/hashing.hpp"
#include "grsk/sketch.hpp"
#include "grsk/stats.hpp"

namespace grsk {

// Smoothed, Poissonized, infinite dartboard: cell j of column i has height
// 2^{-(j + R_i)}, width 1/m, j ranges over all integers, and is free with
// probability exp(-(lambda / m) 2^{-(j + R_i)}) independently of every other cell.

/// Cells with more expected darts than this are taken as occupied (P(free) < 5e-18).
inline constexpr double kOccupiedCutoff = 40.0;

/// Highest occupied cell given an Exp(1) variate e = -ln U: ceil(-log2(e m 2^R / lambda)).
inline int loglog_register_from_exponential(double e, double lambda_over_m, double offset) {
  return static_cast<int>(std::ceil(-std::log2(e * std::exp2(offset) / lambda_over_m)));
}

/// Inverse-CDF draw of the highest occupied cell, P(X <= k) = exp(-(lambda/m) 2^{-(k + R)}).
inline int sample_loglog_register(double lambda_over_m, double offset, SplitMix64& rng) {
  return loglog_register_from_exponential(-std::log(rng.uniform_open()), lambda_over_m, offset);
}

inline std::vector<int> sample_loglog_registers(std::uint32_t m, double lambda, std::span<const double> offsets,
                                                SplitMix64& rng) {
  detail::require(lambda > 0.0, "lambda must be positive");
  std::vector<int> x(m);
  const double density = lambda / m;
  for (std::uint32_t i = 0; i < m; ++i) x[i] = sample_loglog_register(density, offsets[i], rng);
  return x;
}

/// One PCSA column: draw the highest occupied cell, then the independent cells below it
/// until they are occupied with overwhelming probability.
inline PcsaColumn sample_pcsa_column(double lambda_over_m, double offset, SplitMix64& rng) {
  const int top = sample_loglog_register(lambda_over_m, offset, rng);
  PcsaColumn col{top - 63, std::uint64_t{1} << 63};
  for (int k = 62; k >= 0; --k) {
    const double darts = lambda_over_m * std::exp2(-(col.base + k + offset));
    if (darts > kOccupiedCutoff) {
      col.bits |= (std::uint64_t{1} << (k + 1)) - 1;
      break;
    }
    if (rng.uniform01() >= std::exp(-darts)) col.bits |= std::uint64_t{1} << k;
  }
  return col;
}

inline std::vector<PcsaColumn> sample_pcsa_columns(std::uint32_t m, double lambda, std::span<const double> offsets,
                                                   SplitMix64& rng) {
  detail::require(lambda > 0.0, "lambda must be positive");
  std::vector<PcsaColumn> cols(m);
  const double density = lambda / m;
  for (std::uint32_t i = 0; i < m; ++i) cols[i] = sample_pcsa_column(density, offsets[i], rng);
  return cols;
}

// ---------------------------------------------------------------------------
// Per-cell oracle
// ---------------------------------------------------------------------------

struct IndexWindow {
  int lo = 0;
  int hi = 0;

  friend bool operator==(const IndexWindow&, const IndexWindow&) = default;
};

inline IndexWindow default_window(double lambda, std::uint32_t m) {
  const int center = static_cast<int>(std::floor(std::log2(lambda / m)));
  return IndexWindow{center - 45, center + 45};
}

/// Cells below the window must be occupied and cells above free, each except with
/// probability below 1e-12, for every offset in [0, 1).
inline void validate_window(const IndexWindow& w, double lambda, std::uint32_t m) {
  if (w.lo >= w.hi) detail::fail(ErrorCode::invalid_window, "window needs lo < hi");
  const double density = lambda / m;
  const double guard = 1e-12;
  const double below_free = std::exp(-density * std::exp2(-w.lo));   // cell lo - 1 at R -> 1
  const double above_hit = -std::expm1(-density * std::exp2(-w.hi));  // every cell above hi, at R = 0
  if (below_free >= guard) detail::fail(ErrorCode::invalid_window, "window lower edge cuts through live cells");
  if (above_hit >= guard) detail::fail(ErrorCode::invalid_window, "window upper edge cuts through live cells");
}

/// Occupancy of every cell in a window, one row per subsketch.
struct BoardState {
  IndexWindow window;
  std::vector<std::vector<std::uint8_t>> occupied;  // [column][j - window.lo]

  /// Highest occupied cell; lo - 1 if nothing in the window is hit.
  int highest_occupied(std::size_t column) const {
    const auto& row = occupied[column];
    for (int k = static_cast<int>(row.size()) - 1; k >= 0; --k) {
      if (row[static_cast<std::size_t>(k)]) return window.lo + k;
    }
    return window.lo - 1;
  }
};

inline BoardState sample_cells_oracle(std::uint32_t m, double lambda, std::span<const double> offsets,
                                      const IndexWindow& window, SplitMix64& rng) {
  detail::require(lambda > 0.0, "lambda must be positive");
  validate_window(window, lambda, m);
  BoardState state{window, std::vector<std::vector<std::uint8_t>>(m)};
  const double density = lambda / m;
  for (std::uint32_t i = 0; i < m; ++i) {
    auto& row = state.occupied[i];
    row.resize(static_cast<std::size_t>(window.hi - window.lo + 1));
    for (int j = window.lo; j <= window.hi; ++j) {
      const double p_free = std::exp(-density * std::exp2(-(j + offsets[i])));
      row[static_cast<std::size_t>(j - window.lo)] = rng.uniform01() < p_free ? 0 : 1;
    }
  }
  return state;
}

inline std::vector<int> oracle_loglog_registers(const BoardState& state) {
  std::vector<int> x(state.occupied.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = state.highest_occupied(i);
  return x;
}

/// Brute-force PCSA tau-GRA over the window plus the closed-form free tail above it.
inline double oracle_pcsa_gra(const BoardState& state, std::span<const double> offsets, double tau) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.occupied.size(); ++i) {
    for (int j = state.window.lo; j <= state.window.hi; ++j) {
      if (!state.occupied[i][static_cast<std::size_t>(j - state.window.lo)]) total += std::exp2(-tau * (j + offsets[i]));
    }
    total += std::exp2(-tau * (state.window.hi + 1 + offsets[i])) / -std::expm1(-tau * kLn2);
  }
  return total;
}

/// Columns (base, bits) equivalent to the oracle state; requires every occupied cell to lie
/// within 64 cells of the highest one.
inline std::vector<PcsaColumn> oracle_pcsa_columns(const BoardState& state) {
  std::vector<PcsaColumn> cols(state.occupied.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const int top = state.highest_occupied(i);
    cols[i].base = top - 63;
    for (int k = 0; k < 64; ++k) {
      const int j = cols[i].base + k;
      const bool occ = j < state.window.lo || (j <= state.window.hi && state.occupied[i][static_cast<std::size_t>(j - state.window.lo)]);
      if (occ) cols[i].bits |= std::uint64_t{1} << k;
    }
  }
  return cols;
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

struct SimConfig {
  SketchKind kind = SketchKind::loglog;
  std::uint32_t m = 1024;
  double lambda = 1.0;
  double tau = 1.0;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  /// Defaults to random offsets for LogLog and uniform offsets for PCSA.
  std::optional<SmoothingMode> smoothing;
  EstimatorId estimator = EstimatorId::tau_gra;
  /// Set to run every trial through the per-cell oracle instead of the fast sampler.
  std::optional<IndexWindow> index_window;
  unsigned threads = 1;

  SmoothingMode effective_smoothing() const {
    return smoothing.value_or(kind == SketchKind::pcsa ? SmoothingMode::uniform : SmoothingMode::random);
  }
};

struct SimReport {
  std::string statistic;  // "gra" or an estimator id
  double empirical_mean = 0.0;
  double stderr_of_estimate = 0.0;  // standard error of empirical_mean
  double predicted_mean = 0.0;
  double empirical_relvar_times_m = 0.0;
  double stderr_of_relvar = 0.0;
  double predicted = 0.0;  // predicted m * relvar (or normalized variance for "gra")
  std::uint64_t trials = 0;
  SimConfig config;
};

/// Runs f(trial_index, rng) for every trial with per-trial seeds derive_seed(seed, index).
/// The output order and values do not depend on the thread count.
template <class T, class F>
std::vector<T> run_trials(std::uint64_t trials, std::uint64_t seed, unsigned threads, F&& f) {
  std::vector<T> out(trials);
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng(derive_seed(seed, t));
      out[t] = f(t, rng);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(trials, 1))));
  if (n == 1) {
    work(0, trials);
    return out;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (trials + n - 1) / n;
  for (unsigned k = 0; k < n; ++k) {
    const std::uint64_t begin = std::min<std::uint64_t>(trials, k * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(trials, begin + chunk);
    pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return out;
}

namespace detail {

inline void check_config(const SimConfig& c) {
  require(c.trials >= 1, "trials must be at least 1");
  require(c.lambda > 0.0 && std::isfinite(c.lambda), "lambda must be positive");
  check_subsketch_count(c.m);
}

/// One Poissonized sketch realisation: offsets plus either registers or columns.
struct BoardSample {
  OffsetVector offsets;
  std::vector<int> registers;
  std::vector<PcsaColumn> columns;
};

inline BoardSample sample_board(const SimConfig& c, double lambda, SplitMix64& rng) {
  BoardSample s{OffsetVector::sample(c.effective_smoothing(), c.m, rng), {}, {}};
  if (c.index_window) {
    const BoardState state = sample_cells_oracle(c.m, lambda, s.offsets.values(), *c.index_window, rng);
    if (c.kind == SketchKind::loglog) {
      s.registers = oracle_loglog_registers(state);
    } else {
      s.columns = oracle_pcsa_columns(state);
    }
  } else if (c.kind == SketchKind::loglog) {
    s.registers = sample_loglog_registers(c.m, lambda, s.offsets.values(), rng);
  } else {
    s.columns = sample_pcsa_columns(c.m, lambda, s.offsets.values(), rng);
  }
  return s;
}

/// tau = 0 with the tau-GRA estimator routes to the geometric-mean / coupon-collector limit.
inline EstimatorId resolve_estimator(const SimConfig& c) {
  if (c.estimator == EstimatorId::tau_gra && c.tau == 0.0) {
    return c.kind == SketchKind::pcsa ? EstimatorId::lang : EstimatorId::df;
  }
  return c.estimator;
}

inline void check_estimator_kind(SketchKind kind, EstimatorId id) {
  const bool pcsa_only = id == EstimatorId::lang || id == EstimatorId::fm;
  const bool loglog_only = id == EstimatorId::df || id == EstimatorId::ffgm;
  if ((kind == SketchKind::loglog && pcsa_only) || (kind == SketchKind::pcsa && loglog_only)) {
    fail(ErrorCode::invalid_parameter,
         std::string(to_string(id)) + " does not apply to " + to_string(kind) + " sketches");
  }
}

}  // namespace detail

/// Reference m * relvar for the first-zero estimator (no closed form).
inline constexpr double kFmReferenceRelvar = 0.6;

inline double predicted_relvar(SketchKind kind, EstimatorId id, double tau) {
  switch (id) {
    case EstimatorId::tau_gra: return limiting_variance(kind, tau);
    case EstimatorId::ffgm: return loglog_variance(1.0);
    case EstimatorId::df: return loglog_variance(0.0);
    case EstimatorId::lang: return pcsa_variance(0.0);
    case EstimatorId::fm: return kFmReferenceRelvar;
  }
  return 0.0;
}

/// Estimate of lambda from one board sample.
inline double board_estimate(const detail::BoardSample& s, SketchKind kind, EstimatorId id, double tau) {
  const auto r = s.offsets.values();
  if (kind == SketchKind::loglog) {
    switch (id) {
      case EstimatorId::tau_gra: return loglog_tau_estimate(r, s.registers, tau);
      case EstimatorId::ffgm: return loglog_tau_estimate(r, s.registers, 1.0);
      case EstimatorId::df: return loglog_df_estimate(r, s.registers);
      default: break;
    }
  } else {
    switch (id) {
      case EstimatorId::tau_gra: return pcsa_tau_estimate(r, s.columns, tau);
      case EstimatorId::lang: return pcsa_lang_estimate(r, s.columns);
      case EstimatorId::fm: return pcsa_fm_estimate(r, s.columns);
      default: break;
    }
  }
  detail::check_estimator_kind(kind, id);
  return 0.0;
}

/// Density-1 normalized tau-GRA of one board sample: m^{-tau} lambda^tau (1/m) sum A_i for
/// LogLog, m^{-1-tau} lambda^tau sum A_i for PCSA.
inline double board_normalized_gra(const detail::BoardSample& s, SketchKind kind, std::uint32_t m, double lambda,
                                   double tau) {
  const double scale = std::pow(lambda / m, tau);
  if (kind == SketchKind::loglog) return scale * loglog_gra(s.offsets.values(), s.registers, tau);
  return scale / m * pcsa_gra(s.offsets.values(), s.columns, tau);
}

/// Empirical mean and m * variance of the normalized tau-GRA, against the closed forms.
inline SimReport empirical_gra_moments(const SimConfig& config) {
  detail::check_config(config);
  detail::check_tau_open(config.tau);
  const auto values = run_trials<double>(config.trials, config.seed, config.threads, [&](std::uint64_t, SplitMix64& rng) {
    const auto board = detail::sample_board(config, config.lambda, rng);
    return board_normalized_gra(board, config.kind, config.m, config.lambda, config.tau);
  });
  const auto sum = summarize(values);
  const double dm = config.m;
  SimReport r;
  r.statistic = "gra";
  r.empirical_mean = sum.mean;
  r.stderr_of_estimate = sum.stderr_mean;
  r.empirical_relvar_times_m = dm * sum.variance;
  r.stderr_of_relvar = dm * sum.stderr_variance;
  if (config.kind == SketchKind::loglog) {
    r.predicted_mean = loglog_gra_mean(config.tau);
    r.predicted = loglog_gra_variance(config.tau);
  } else {
    r.predicted_mean = pcsa_gra_mean(config.tau);
    r.predicted = pcsa_gra_variance(config.tau);
  }
  r.trials = config.trials;
  r.config = config;
  return r;
}

/// Samples of lambda_hat / lambda over independent trials.
inline std::vector<double> estimator_ratios(const SimConfig& config, double lambda, std::uint64_t seed) {
  const EstimatorId id = detail::resolve_estimator(config);
  detail::check_estimator_kind(config.kind, id);
  if (id == EstimatorId::tau_gra) detail::check_tau_open(config.tau);
  return run_trials<double>(config.trials, seed, config.threads, [&](std::uint64_t, SplitMix64& rng) {
    const auto board = detail::sample_board(config, lambda, rng);
    return board_estimate(board, config.kind, id, config.tau) / lambda;
  });
}

/// Bias and m * relative variance of the configured estimator.
inline SimReport empirical_estimator_stats(const SimConfig& config) {
  detail::check_config(config);
  const EstimatorId id = detail::resolve_estimator(config);
  const auto ratios = estimator_ratios(config, config.lambda, config.seed);
  const auto sum = summarize(ratios);
  const double dm = config.m;
  SimReport r;
  r.statistic = to_string(id);
  r.empirical_mean = sum.mean;
  r.stderr_of_estimate = sum.stderr_mean;
  r.predicted_mean = 1.0;
  r.empirical_relvar_times_m = dm * sum.variance;
  r.stderr_of_relvar = dm * sum.stderr_variance;
  r.predicted = predicted_relvar(config.kind, id, config.tau);
  r.trials = config.trials;
  r.config = config;
  return r;
}

struct ScalePairResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double ks_estimate = 0.0;  // KS between lambda_hat / lambda at both densities
  double ks_gra = 0.0;       // KS between lambda^tau A at both densities
};

/// Two-sample KS checks of scale invariance; each density uses an independent seed stream.
inline std::vector<ScalePairResult> scale_invariance_test(SketchKind kind, double tau, std::uint32_t m,
                                                          const std::vector<std::pair<double, double>>& lambda_pairs,
                                                          std::uint64_t trials, std::uint64_t seed,
                                                          unsigned threads = 1) {
  detail::check_tau_open(tau);
  SimConfig c;
  c.kind = kind;
  c.m = m;
  c.tau = tau;
  c.trials = trials;
  c.threads = threads;
  detail::check_config(c);

  auto side = [&](double lambda, std::uint64_t side_seed) {
    detail::require(lambda > 0.0, "lambda must be positive");
    struct Pair {
      double ratio;
      double gra;
    };
    const auto samples = run_trials<Pair>(trials, side_seed, threads, [&](std::uint64_t, SplitMix64& rng) {
      const auto board = detail::sample_board(c, lambda, rng);
      return Pair{board_estimate(board, kind, EstimatorId::tau_gra, tau) / lambda,
                  board_normalized_gra(board, kind, m, lambda, tau)};
    });
    std::pair<std::vector<double>, std::vector<double>> out;
    for (const auto& s : samples) {
      out.first.push_back(s.ratio);
      out.second.push_back(s.gra);
    }
    return out;
  };

  std::vector<ScalePairResult> results;
  for (std::size_t p = 0; p < lambda_pairs.size(); ++p) {
    const auto [l1, l2] = lambda_pairs[p];
    const auto a = side(l1, derive_seed(seed, 2 * p));
    const auto b = side(l2, derive_seed(seed, 2 * p + 1));
    results.push_back({l1, l2, ks_two_sample(a.first, b.first), ks_two_sample(a.second, b.second)});
  }
  return results;
}

struct Calibration {
  EstimatorId estimator = EstimatorId::fm;
  std::uint32_t m = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double kappa = 0.0;         // multiplier of m 2^{mean(stat) + mean(R)}
  double kappa_stderr = 0.0;
  double constant = 0.0;      // multiplier of m 2^{mean(stat)}, i.e. kappa 2^{mean(R)}
  double constant_stderr = 0.0;
};

/// Monte Carlo constant that makes the first-zero or coupon-collector estimator unbiased
/// on the Poissonized board with uniform offsets (simulated at lambda = 1).
inline Calibration calibrate_constant(EstimatorId id, std::uint32_t m, std::uint64_t trials, std::uint64_t seed,
                                      unsigned threads = 1) {
  detail::require(id == EstimatorId::fm || id == EstimatorId::lang, "calibration applies to fm and lang only");
  detail::require(trials >= 1, "trials must be at least 1");
  SimConfig c;
  c.kind = SketchKind::pcsa;
  c.m = m;
  c.trials = trials;
  c.seed = seed;
  detail::check_config(c);
  const auto raw = run_trials<double>(trials, seed, threads, [&](std::uint64_t, SplitMix64& rng) {
    const auto board = detail::sample_board(c, 1.0, rng);
    const auto r = board.offsets.values();
    return id == EstimatorId::fm ? pcsa_fm_estimate(r, board.columns, 1.0)
                                 : pcsa_lang_estimate(r, board.columns) / kLangConstant;
  });
  const auto sum = summarize(raw);
  Calibration out;
  out.estimator = id;
  out.m = m;
  out.trials = trials;
  out.seed = seed;
  out.kappa = 1.0 / sum.mean;
  out.kappa_stderr = out.kappa * sum.stderr_mean / sum.mean;
  const double lift = std::exp2(OffsetVector::from_offset_seed(SmoothingMode::uniform, m, 0).mean());
  out.constant = out.kappa * lift;
  out.constant_stderr = out.kappa_stderr * lift;
  return out;
}

}  // namespace grsk

#endif  // GRSK_POISSON_SIM_HPP_
