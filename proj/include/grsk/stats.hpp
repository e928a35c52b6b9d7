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

#ifndef GRSK_STATS_HPP_
#define GRSK_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace grsk {

/// Mean and variance of a sample, with standard errors for both.
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;           // unbiased
  double stderr_mean = 0.0;
  double stderr_variance = 0.0;    // sqrt((mu4 - s^4) / n)
};

inline SampleSummary summarize(std::span<const double> xs) {
  SampleSummary out;
  out.n = xs.size();
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - out.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  if (xs.size() > 1) out.variance = m2 / (n - 1.0);
  const double pop_var = m2 / n;
  out.stderr_mean = std::sqrt(out.variance / n);
  out.stderr_variance = std::sqrt(std::max(0.0, m4 / n - pop_var * pop_var) / n);
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// One-sample KS statistic. The CDF must be right-continuous; the left limit at each sample
/// point is read just below it, so step CDFs of discrete data are handled exactly.
template <class Cdf>
double ks_one_sample(std::vector<double> xs, Cdf&& cdf) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    const double x = xs[i];
    const double below = static_cast<double>(i) / n;
    while (i < xs.size() && xs[i] == x) ++i;
    const double f = cdf(x);
    const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(static_cast<double>(i) / n - f), std::abs(below - f_left)});
  }
  return d;
}

}  // namespace grsk

#endif  // GRSK_STATS_HPP_
