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

#ifndef GRSK_REPORT_IO_HPP_
#define GRSK_REPORT_IO_HPP_

#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "grsk/poisson_sim.hpp"

namespace grsk {

inline nlohmann::ordered_json to_json(const SimReport& r) {
  const SimConfig& c = r.config;
  nlohmann::ordered_json config = {
      {"kind", to_string(c.kind)},
      {"m", c.m},
      {"lambda", c.lambda},
      {"tau", c.tau},
      {"trials", c.trials},
      {"seed", c.seed},
      {"smoothing", to_string(c.effective_smoothing())},
      {"estimator", to_string(c.estimator)},
  };
  return {
      {"statistic", r.statistic},
      {"empirical_mean", r.empirical_mean},
      {"stderr_of_estimate", r.stderr_of_estimate},
      {"predicted_mean", r.predicted_mean},
      {"empirical_relvar_times_m", r.empirical_relvar_times_m},
      {"stderr_of_relvar", r.stderr_of_relvar},
      {"predicted", r.predicted},
      {"trials", r.trials},
      {"config", config},
  };
}

inline const char* sim_csv_header() {
  return "kind,estimator,smoothing,m,lambda,tau,trials,seed,statistic,empirical_mean,stderr_of_estimate,"
         "predicted_mean,empirical_relvar_times_m,stderr_of_relvar,predicted";
}

inline std::string to_csv_row(const SimReport& r) {
  const SimConfig& c = r.config;
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << to_string(c.kind) << ',' << to_string(c.estimator) << ',' << to_string(c.effective_smoothing()) << ','
     << c.m << ',' << c.lambda << ',' << c.tau << ',' << c.trials << ',' << c.seed << ',' << r.statistic << ','
     << r.empirical_mean << ',' << r.stderr_of_estimate << ',' << r.predicted_mean << ','
     << r.empirical_relvar_times_m << ',' << r.stderr_of_relvar << ',' << r.predicted;
  return os.str();
}

}  // namespace grsk

#endif  // GRSK_REPORT_IO_HPP_
