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

#ifndef GRSK_OPTIMIZE_HPP_
#define GRSK_OPTIMIZE_HPP_

#include <cmath>
#include <string>

#include "grsk/error.hpp"

namespace grsk {

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Golden-section search for the minimum of a unimodal function on [a, b].
/// Stops once the bracket is narrower than tol, so |x - argmin| <= tol.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double a, double b, double tol, int max_iterations = 1000) {
  detail::require(a < b, "golden-section bracket must satisfy a < b");
  detail::require(tol > 0.0, "golden-section tolerance must be positive");

  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      detail::fail(ErrorCode::numerical_failure, "objective is not finite at x = " + std::to_string(x));
    }
    return y;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  int it = 0;
  while (b - a > tol && it < max_iterations) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
    ++it;
  }
  const double x = 0.5 * (a + b);
  return ScalarMinimum{x, eval(x), it};
}

}  // namespace grsk

#endif  // GRSK_OPTIMIZE_HPP_
