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

// Builds two sketches over overlapping key ranges, merges them through the
// binary format and compares the estimators against the true union size.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "grsk/grsk.hpp"

int main() {
  constexpr std::uint32_t kM = 4096;
  constexpr std::uint64_t kSeed = 0x5eed;

  grsk::LogLogSketch a(kM, grsk::SmoothingMode::random, kSeed);
  grsk::LogLogSketch b(kM, grsk::SmoothingMode::random, kSeed);
  grsk::PcsaSketch p(kM, grsk::SmoothingMode::uniform, kSeed);
  for (std::uint64_t k = 0; k < 600000; ++k) a.insert("user-" + std::to_string(k));
  for (std::uint64_t k = 400000; k < 1000000; ++k) b.insert("user-" + std::to_string(k));
  for (std::uint64_t k = 0; k < 1000000; ++k) p.insert("user-" + std::to_string(k));

  // Round-trip one side through bytes before merging, as a distributed job would.
  const auto bytes = grsk::serialize(b);
  const auto b2 = std::get<grsk::LogLogSketch>(grsk::deserialize(bytes));
  const grsk::LogLogSketch u = grsk::merge(a, b2);

  const double ll_tau = grsk::optimal_tau(grsk::SketchKind::loglog);
  const double pc_tau = grsk::optimal_tau(grsk::SketchKind::pcsa);
  std::cout << "true union          1000000\n";
  std::cout << "loglog tau*=" << ll_tau << "  " << grsk::estimate_loglog_gra(u, ll_tau).lambda_hat << '\n';
  std::cout << "loglog ffgm         " << grsk::estimate_ffgm(u).lambda_hat << '\n';
  std::cout << "loglog df           " << grsk::estimate_df(u).lambda_hat << '\n';
  std::cout << "pcsa tau*=" << pc_tau << "  " << grsk::estimate_pcsa_gra(p, pc_tau).lambda_hat << '\n';
  std::cout << "pcsa lang           " << grsk::estimate_lang(p).lambda_hat << '\n';
  std::cout << "pcsa fm             " << grsk::estimate_fm(p).lambda_hat << '\n';
  std::cout << "expected std error  loglog " << std::sqrt(grsk::loglog_variance(ll_tau) / kM) << ", pcsa "
            << std::sqrt(grsk::pcsa_variance(pc_tau) / kM) << '\n';
  return 0;
}
