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

#ifndef GRSK_ANALYSIS_HPP_
#define GRSK_ANALYSIS_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "grsk/error.hpp"
#include "grsk/optimize.hpp"
#include "grsk/sketch.hpp"

namespace grsk {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Largest tau accepted by the estimators and variance curves.
inline constexpr double kMaxTau = 16.0;

/// Below this tau the variance curves switch to their series expansion about 0.
inline constexpr double kSmallTau = 1e-4;

/// Gamma function on (0, 35].
inline double gamma_fn(double x) {
  if (!(x > 0.0 && x <= 35.0)) detail::fail(ErrorCode::invalid_parameter, "gamma_fn domain is (0, 35]");
  return std::tgamma(x);
}

namespace detail {

inline void check_tau_closed(double tau) {
  if (!(tau >= 0.0 && tau <= kMaxTau)) fail(ErrorCode::invalid_parameter, "tau must lie in [0, 16]");
}

inline void check_tau_open(double tau) {
  if (!(tau > 0.0 && tau <= kMaxTau)) fail(ErrorCode::invalid_parameter, "tau must lie in (0, 16]");
}

// ln Gamma(1+2t) - 2 ln Gamma(1+t) = t^2 * sum_k (-1)^k zeta(k) (2^k - 2) / k * t^{k-2}.
// Truncation after k = 6 is below 1e-18 for t <= 1e-4.
inline double log_gamma_ratio_over_t2(double t) {
  constexpr double z2 = kPi * kPi / 6.0;
  constexpr double z3 = 1.2020569031595942854;
  constexpr double z4 = kPi * kPi * kPi * kPi / 90.0;
  constexpr double z5 = 1.0369277551433699263;
  constexpr double z6 = kPi * kPi * kPi * kPi * kPi * kPi / 945.0;
  return z2 + t * (-2.0 * z3 + t * (3.5 * z4 + t * (-6.0 * z5 + t * (62.0 / 6.0) * z6)));
}

// ln Gamma(1+2t) - 2 ln Gamma(1+t). Near 0 the two lgamma values nearly cancel, so the
// zeta series is summed instead; at t < 0.05 twenty terms reach full precision.
inline double log_gamma_ratio(double t) {
  if (t >= 0.05) return std::lgamma(1.0 + 2.0 * t) - 2.0 * std::lgamma(1.0 + t);
  static const std::array<double, 21> coeff = [] {
    std::array<double, 21> c{};
    for (int k = 2; k <= 20; ++k) c[k] = std::riemann_zeta(static_cast<double>(k)) * (std::ldexp(1.0, k) - 2.0) / k;
    return c;
  }();
  double sum = 0.0;
  for (int k = 20; k >= 2; --k) sum = sum * -t + coeff[k];
  return t * t * sum;
}

// ln(x coth x), with x coth x - 1 taken from its Taylor series for small x.
inline double log_x_coth_x(double x) {
  if (x >= 0.05) return std::log(x / std::tanh(x));
  const double x2 = x * x;
  const double excess = x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * 2.0 / 93555.0))));
  return std::log1p(excess);
}

// (e^y - 1) / y, with the removable singularity at 0.
inline double expm1_ratio(double y) { return y == 0.0 ? 1.0 : std::expm1(y) / y; }

// (1 - 2^{-2t}) / (2t), limit ln 2 at t = 0.
inline double pcsa_edge_factor(double t) { return t == 0.0 ? kLn2 : -std::expm1(-2.0 * t * kLn2) / (2.0 * t); }

inline double loglog_variance_series(double tau) {
  const double c = kLn2 / 2.0;
  const double c2 = c * c;
  const double l_over_t2 = c2 / 3.0 - 7.0 * c2 * c2 * tau * tau / 90.0 + log_gamma_ratio_over_t2(tau);
  return l_over_t2 * expm1_ratio(l_over_t2 * tau * tau);
}

// tau^{-2} (Gamma(2 tau) ln 2 / Gamma(tau)^2 * (1 + 2^{-tau}) / (1 - 2^{-tau}) - 1), rewritten as
// tau^{-2} expm1(ln(x coth x) + ln Gamma(1 + 2 tau) - 2 ln Gamma(1 + tau)) with x = tau ln2 / 2
// so the bracket does not cancel catastrophically.
inline double loglog_variance_closed(double tau) {
  const double x = tau * kLn2 / 2.0;
  const double log_bracket = log_x_coth_x(x) + log_gamma_ratio(tau);
  return std::expm1(log_bracket) / (tau * tau);
}

inline double pcsa_variance_series(double tau) {
  return kLn2 * pcsa_edge_factor(tau) * std::exp(tau * tau * log_gamma_ratio_over_t2(tau));
}

inline double pcsa_variance_closed(double tau) {
  const double g = gamma_fn(tau);
  return -std::expm1(-2.0 * tau * kLn2) * gamma_fn(2.0 * tau) * kLn2 / (tau * tau * g * g);
}

}  // namespace detail

/// Limiting m * relative variance of the LogLog tau-GRA estimator with random offsets.
/// tau = 0 gives the geometric-mean limit (2 pi^2 + ln^2 2) / 12.
inline double loglog_variance(double tau) {
  detail::check_tau_closed(tau);
  return tau <= kSmallTau ? detail::loglog_variance_series(tau) : detail::loglog_variance_closed(tau);
}

/// Limiting m * relative variance of the PCSA tau-GRA estimator with uniform offsets.
/// tau = 0 gives ln^2 2.
inline double pcsa_variance(double tau) {
  detail::check_tau_closed(tau);
  return tau <= kSmallTau ? detail::pcsa_variance_series(tau) : detail::pcsa_variance_closed(tau);
}

inline double limiting_variance(SketchKind kind, double tau) {
  return kind == SketchKind::pcsa ? pcsa_variance(tau) : loglog_variance(tau);
}

/// ln of (Gamma(tau) (1 - 2^{-tau}) / ln 2)^{1/tau}.
inline double log_loglog_bias_constant(double tau) {
  detail::check_tau_open(tau);
  const double edge = -std::expm1(-tau * kLn2) / tau;  // (1 - 2^{-tau}) / tau
  return (std::log(gamma_fn(1.0 + tau)) + std::log(edge) - std::log(kLn2)) / tau;
}

/// ln of (Gamma(tau) / ln 2)^{1/tau}.
inline double log_pcsa_bias_constant(double tau) {
  detail::check_tau_open(tau);
  return (std::log(gamma_fn(1.0 + tau)) - std::log(tau) - std::log(kLn2)) / tau;
}

inline double loglog_bias_constant(double tau) { return std::exp(log_loglog_bias_constant(tau)); }

/// Overflows double below tau ~ 1e-3; estimators use the log form instead.
inline double pcsa_bias_constant(double tau) {
  const double c = std::exp(log_pcsa_bias_constant(tau));
  if (!std::isfinite(c)) detail::fail(ErrorCode::numerical_failure, "pcsa bias constant overflows at this tau");
  return c;
}

/// Mean of the per-subsketch LogLog tau-GRA at density 1, scaled by m^{-tau}.
inline double loglog_gra_mean(double tau) {
  detail::check_tau_open(tau);
  return gamma_fn(tau) * -std::expm1(-tau * kLn2) / kLn2;
}

/// Variance of the per-subsketch LogLog tau-GRA at density 1, scaled by m^{-2 tau}.
inline double loglog_gra_variance(double tau) {
  const double mu = loglog_gra_mean(tau);
  return gamma_fn(2.0 * tau) * -std::expm1(-2.0 * tau * kLn2) / kLn2 - mu * mu;
}

/// Limit of m^{-1-tau} times the summed PCSA tau-GRA means at density 1.
inline double pcsa_gra_mean(double tau) {
  detail::check_tau_open(tau);
  return gamma_fn(tau) / kLn2;
}

/// Limit of m^{-1-2 tau} times the summed PCSA tau-GRA variances at density 1.
inline double pcsa_gra_variance(double tau) {
  detail::check_tau_open(tau);
  return -std::expm1(-2.0 * tau * kLn2) * gamma_fn(2.0 * tau) / kLn2;
}

/// Cramer-Rao reference constants (m * relative variance) for unbiased estimators.
inline double cramer_rao(SketchKind kind) {
  if (kind == SketchKind::pcsa) return 6.0 * kLn2 / (kPi * kPi);
  return kLn2 / (kPi * kPi / 6.0 - 1.0);
}

struct TauOptimum {
  double tau_star = 0.0;
  double v_star = 0.0;
  bool unimodal = true;
};

/// Minimizes f over [lo, hi]. A coarse grid scan decides whether golden-section
/// can run on the whole interval; otherwise it refines around the best grid point.
template <class F>
TauOptimum minimize_curve(F&& f, double lo, double hi, double tol) {
  detail::require(lo < hi, "optimizer interval must satisfy lo < hi");
  detail::require(tol >= 1e-8, "optimizer tolerance must be at least 1e-8");
  constexpr int kGrid = 64;
  std::vector<double> values(kGrid + 1);
  const double step = (hi - lo) / kGrid;
  std::size_t best = 0;
  for (int i = 0; i <= kGrid; ++i) {
    values[i] = f(lo + step * i);
    if (!std::isfinite(values[i])) detail::fail(ErrorCode::numerical_failure, "variance curve is not finite");
    if (values[i] < values[best]) best = static_cast<std::size_t>(i);
  }
  bool unimodal = true;
  for (std::size_t i = 1; i <= best; ++i) unimodal = unimodal && values[i] <= values[i - 1];
  for (std::size_t i = best + 1; i < values.size(); ++i) unimodal = unimodal && values[i] >= values[i - 1];

  double a = lo;
  double b = hi;
  if (!unimodal) {
    a = lo + step * (best == 0 ? 0.0 : static_cast<double>(best) - 1.0);
    b = lo + step * std::min<double>(static_cast<double>(best) + 1.0, kGrid);
  }
  const auto found = golden_section_minimize(f, a, b, tol);
  return TauOptimum{found.x, found.fx, unimodal};
}

inline TauOptimum optimize_tau(SketchKind kind, double lo, double hi, double tol = 1e-8) {
  detail::require(lo > 0.0 && hi <= kMaxTau, "optimizer interval must lie in (0, 16]");
  return minimize_curve([kind](double t) { return limiting_variance(kind, t); }, lo, hi, tol);
}

/// Default search intervals for tau*.
inline std::pair<double, double> default_tau_bracket(SketchKind kind) {
  return kind == SketchKind::pcsa ? std::pair{0.05, 3.0} : std::pair{0.1, 3.0};
}

inline double optimal_tau(SketchKind kind) {
  const auto [lo, hi] = default_tau_bracket(kind);
  return optimize_tau(kind, lo, hi).tau_star;
}

struct VarianceCurve {
  SketchKind kind = SketchKind::loglog;
  std::vector<std::pair<double, double>> points;  // (tau, m * limiting relative variance)
  double tau_star = 0.0;
  double v_star = 0.0;
};

/// Samples the limiting variance at `steps` evenly spaced taus in [lo, hi] (inclusive).
inline VarianceCurve variance_curve(SketchKind kind, double lo, double hi, int steps) {
  detail::require(lo >= 0.0 && lo < hi && hi <= kMaxTau, "curve range must satisfy 0 <= lo < hi <= 16");
  detail::require(steps >= 2, "curve needs at least two steps");
  VarianceCurve curve;
  curve.kind = kind;
  curve.points.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double tau = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
    curve.points.emplace_back(tau, limiting_variance(kind, tau));
  }
  const auto opt = optimize_tau(kind, std::max(lo, 1e-6), hi);
  curve.tau_star = opt.tau_star;
  curve.v_star = opt.v_star;
  return curve;
}

}  // namespace grsk

#endif  // GRSK_ANALYSIS_HPP_
