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

#ifndef GRSK_GRSK_HPP_
#define GRSK_GRSK_HPP_

#include "grsk/analysis.hpp"
#include "grsk/error.hpp"
#include "grsk/estimators.hpp"
#include "grsk/hashing.hpp"
#include "grsk/optimize.hpp"
#include "grsk/poisson_sim.hpp"
#include "grsk/serialization.hpp"
#include "grsk/sketch.hpp"
#include "grsk/stats.hpp"

#endif  // GRSK_GRSK_HPP_
