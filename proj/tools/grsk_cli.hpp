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

// Command-line front end for grsk sketches. The dispatcher lives in a header so
// the test suite can drive it in-process with string streams.

#ifndef GRSK_TOOLS_GRSK_CLI_HPP_
#define GRSK_TOOLS_GRSK_CLI_HPP_

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grsk/grsk.hpp"
#include "grsk/report_io.hpp"

namespace grsk::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kEmpty = 3,
  kIncompatible = 4,
  kNumerical = 5,
};

/// Raised for unreadable input or bad flag combinations.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_sketch: return kEmpty;
    case ErrorCode::incompatible_sketch: return kIncompatible;
    case ErrorCode::numerical_failure: return kNumerical;
    default: return kUsage;
  }
}

struct CliConfig {
  std::string subcommand;
  std::string sketch = "loglog";
  std::uint32_t m = 4096;
  std::optional<double> tau;
  std::string seed = "0";
  std::optional<std::string> smoothing;
  std::string estimator = "tau-gra";
  std::string format;  // empty selects the subcommand default
  std::optional<std::string> output;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> trials;
  double lambda = 1.0;
  double tau_min = 0.0;
  double tau_max = 3.0;
  int steps = 61;
  unsigned threads = 0;
  bool empty_as_zero = false;
  bool gra = false;
};

/// Decimal or 0x-prefixed hexadecimal 64-bit seed.
inline std::uint64_t parse_seed(const std::string& text) {
  int base = 10;
  std::string_view digits = text;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    base = 16;
    digits.remove_prefix(2);
  }
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty()) {
    throw UsageError("invalid seed '" + text + "'");
  }
  return value;
}

inline std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes, std::ostream& out) {
  if (path == "-") {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw UsageError("cannot write '" + path + "'");
}

inline AnySketch load_sketch(const std::string& path, std::istream& in) {
  const auto bytes = read_file(path, in);
  try {
    return deserialize(bytes);
  } catch (const Error& e) {
    std::string where = e.offset() ? " at byte " + std::to_string(*e.offset()) : "";
    throw Error(e.code(), path + ": " + e.what() + where, e.offset());
  }
}

inline void check_format(const CliConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (c.format == f) return;
  }
  throw UsageError("--format " + c.format + " is not available for " + c.subcommand);
}

inline unsigned thread_count(const CliConfig& c) {
  return c.threads != 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
}

inline double default_tau(SketchKind kind, const CliConfig& c) {
  return c.tau.value_or(optimal_tau(kind));
}

inline void print_estimate(const Estimate& e, SketchKind kind, const CliConfig& c, std::ostream& out) {
  if (c.format == "json") {
    nlohmann::ordered_json j = {{"lambda_hat", e.lambda_hat}, {"estimator", to_string(e.estimator)},
                                {"tau", nullptr},           {"sketch", to_string(kind)},
                                {"m", e.m},                 {"low_confidence", e.low_confidence}};
    if (e.tau) j["tau"] = *e.tau;
    out << j.dump() << '\n';
  } else if (c.format == "csv") {
    out << "lambda_hat,estimator,tau,sketch,m,low_confidence\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << e.lambda_hat << ','
        << to_string(e.estimator) << ',' << (e.tau ? fmt(*e.tau, 17) : "") << ',' << to_string(kind) << ',' << e.m
        << ',' << (e.low_confidence ? "true" : "false") << '\n';
  } else {
    out << "lambda_hat " << fmt(e.lambda_hat) << "\nestimator " << to_string(e.estimator);
    if (e.tau) out << "\ntau " << fmt(*e.tau);
    out << "\nsketch " << to_string(kind) << "\nm " << e.m;
    if (e.low_confidence) out << "\nlow_confidence true";
    out << '\n';
  }
}

/// Applies the configured estimator; empty sketches are refused whatever the estimator.
inline Estimate estimate_sketch(const AnySketch& sketch, const CliConfig& c) {
  const SketchKind kind = kind_of(sketch);
  const EstimatorId id = parse_estimator(c.estimator);
  grsk::detail::check_estimator_kind(kind, id);
  const bool empty = std::visit([](const auto& s) { return s.is_empty(); }, sketch);
  if (empty) grsk::detail::fail(ErrorCode::empty_sketch, "sketch is empty, no estimate");
  return estimate(sketch, id, id == EstimatorId::tau_gra ? default_tau(kind, c) : 1.0,
                  EstimateOptions{c.empty_as_zero});
}

// --- subcommands -----------------------------------------------------------

inline int cmd_estimate(const CliConfig& c, std::istream& in, std::ostream& out) {
  check_format(c, {"text", "json", "csv"});
  const SketchKind kind = parse_sketch_kind(c.sketch);
  const EstimatorId id = parse_estimator(c.estimator);
  grsk::detail::check_estimator_kind(kind, id);
  if (c.tau) grsk::detail::check_tau_open(*c.tau);
  check_subsketch_count(c.m);
  const SmoothingMode mode = c.smoothing ? parse_smoothing(*c.smoothing)
                                         : (kind == SketchKind::pcsa ? SmoothingMode::uniform : SmoothingMode::random);
  AnySketch sketch = new_sketch(kind, c.m, mode, parse_seed(c.seed));
  const std::string path = c.inputs.empty() ? "-" : c.inputs.front();

  std::ifstream file;
  std::istream* src = &in;
  if (path != "-") {
    file.open(path, std::ios::binary);
    if (!file) throw UsageError("cannot read '" + path + "'");
    src = &file;
  }
  std::string line;
  std::visit(
      [&](auto& s) {
        while (std::getline(*src, line)) s.insert(std::string_view(line));
      },
      sketch);
  if (src->bad()) throw UsageError("error while reading '" + path + "'");

  if (c.output) write_file(*c.output, serialize(sketch), out);
  print_estimate(estimate_sketch(sketch, c), kind, c, out);
  return kOk;
}

inline int cmd_merge(const CliConfig& c, std::istream& in, std::ostream& out) {
  if (c.inputs.size() < 2) throw UsageError("merge needs at least two sketch files");
  if (!c.output) throw UsageError("merge needs --output PATH");
  AnySketch acc = load_sketch(c.inputs[0], in);
  for (std::size_t i = 1; i < c.inputs.size(); ++i) acc = merge(acc, load_sketch(c.inputs[i], in));
  write_file(*c.output, serialize(acc), out);
  return kOk;
}

inline int cmd_inspect(const CliConfig& c, std::istream& in, std::ostream& out) {
  check_format(c, {"text", "json", "csv"});
  if (c.inputs.size() != 1) throw UsageError("inspect takes exactly one sketch file");
  if (c.tau) grsk::detail::check_tau_open(*c.tau);
  const AnySketch sketch = load_sketch(c.inputs[0], in);
  print_estimate(estimate_sketch(sketch, c), kind_of(sketch), c, out);
  return kOk;
}

inline int cmd_variance_curve(const CliConfig& c, std::ostream& out) {
  check_format(c, {"text", "csv"});
  const SketchKind kind = parse_sketch_kind(c.sketch);
  const auto curve = variance_curve(kind, c.tau_min, c.tau_max, c.steps);
  const double cr = cramer_rao(kind);
  out << "tau,limiting_relvar_times_m,cramer_rao_constant\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [tau, v] : curve.points) out << tau << ',' << v << ',' << cr << '\n';
  return kOk;
}

inline int cmd_simulate(const CliConfig& c, std::ostream& out) {
  check_format(c, {"text", "json", "csv"});
  SimConfig s;
  s.kind = parse_sketch_kind(c.sketch);
  s.m = c.m;
  s.lambda = c.lambda;
  s.trials = c.trials.value_or(1000);
  s.seed = parse_seed(c.seed);
  if (c.smoothing) s.smoothing = parse_smoothing(*c.smoothing);
  s.estimator = parse_estimator(c.estimator);
  s.tau = c.tau.value_or(s.estimator == EstimatorId::tau_gra ? optimal_tau(s.kind) : 1.0);
  s.threads = thread_count(c);
  if (s.estimator == EstimatorId::ffgm) s.tau = 1.0;
  const SimReport r = c.gra ? empirical_gra_moments(s) : empirical_estimator_stats(s);

  if (c.format == "json") {
    out << to_json(r).dump(2) << '\n';
  } else if (c.format == "csv") {
    out << sim_csv_header() << '\n' << to_csv_row(r) << '\n';
  } else {
    out << "statistic " << r.statistic << " (" << to_string(s.kind) << ", m=" << s.m << ", tau=" << fmt(s.tau)
        << ", lambda=" << fmt(s.lambda) << ", trials=" << r.trials << ")\n";
    out << "                empirical          predicted\n";
    out << "mean            " << std::left << std::setw(19) << fmt(r.empirical_mean) << fmt(r.predicted_mean)
        << "  (stderr " << fmt(r.stderr_of_estimate, 4) << ")\n";
    out << "m*relvar        " << std::setw(19) << fmt(r.empirical_relvar_times_m) << fmt(r.predicted)
        << "  (stderr " << fmt(r.stderr_of_relvar, 4) << ")\n";
  }
  return kOk;
}

inline int cmd_optimize_tau(const CliConfig& c, std::ostream& out) {
  check_format(c, {"text", "json"});
  const SketchKind kind = parse_sketch_kind(c.sketch);
  const auto [lo, hi] = default_tau_bracket(kind);
  const TauOptimum opt = optimize_tau(kind, lo, hi);
  const double cr = cramer_rao(kind);
  const double gap = 100.0 * (opt.v_star / cr - 1.0);
  if (c.format == "json") {
    nlohmann::ordered_json j = {{"sketch", to_string(kind)},
                                {"tau_star", opt.tau_star},
                                {"v_star", opt.v_star},
                                {"cramer_rao_constant", cr},
                                {"gap_percent", gap}};
    out << j.dump() << '\n';
  } else {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "sketch " << to_string(kind) << "\ntau_star " << opt.tau_star << "\nv_star " << opt.v_star
        << "\ncramer_rao_constant " << cr << "\ngap_percent " << gap << '\n';
  }
  return kOk;
}

inline int cmd_calibrate(const CliConfig& c, std::ostream& out) {
  check_format(c, {"text", "json"});
  const EstimatorId id = parse_estimator(c.estimator);
  if (id != EstimatorId::fm && id != EstimatorId::lang) throw UsageError("calibrate takes --estimator fm or lang");
  const std::uint64_t trials = c.trials.value_or(10000);
  if (trials == 0) grsk::detail::fail(ErrorCode::invalid_parameter, "trials must be at least 1");
  const Calibration cal = calibrate_constant(id, c.m, trials, parse_seed(c.seed), thread_count(c));
  const double shipped = id == EstimatorId::fm ? kFmConstant : kLangConstant;
  if (c.format == "json") {
    nlohmann::ordered_json j = {{"estimator", to_string(id)},  {"m", cal.m},
                                {"trials", cal.trials},         {"seed", cal.seed},
                                {"kappa", cal.kappa},           {"kappa_stderr", cal.kappa_stderr},
                                {"constant", cal.constant},     {"constant_stderr", cal.constant_stderr},
                                {"shipped_kappa", shipped}};
    out << j.dump() << '\n';
  } else {
    out << "estimator " << to_string(id) << "\nkappa " << fmt(cal.kappa) << " +- " << fmt(cal.kappa_stderr, 3)
        << "\nconstant " << fmt(cal.constant) << " +- " << fmt(cal.constant_stderr, 3) << "\nshipped_kappa "
        << fmt(shipped) << '\n';
  }
  return kOk;
}

}  // namespace detail

/// Parses argv-style arguments (without the program name) and runs the subcommand.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Mergeable cardinality sketches with tau-GRA estimators", "grsk"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds{"pcsa", "loglog"};
  const std::vector<std::string> modes{"none", "random", "uniform"};
  const std::vector<std::string> estimators{"tau-gra", "df", "ffgm", "lang", "fm"};
  const std::vector<std::string> formats{"json", "csv", "text"};

  auto add_kind = [&](CLI::App* s) {
    s->add_option("--sketch", c.sketch, "Sketch kind")->check(CLI::IsMember(kinds));
  };
  auto add_m = [&](CLI::App* s) { s->add_option("--m", c.m, "Number of subsketches")->check(CLI::Range(1u, kMaxSubsketches)); };
  auto add_tau = [&](CLI::App* s) { s->add_option("--tau", c.tau, "GRA exponent (default: tau* for the kind)"); };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "64-bit seed, decimal or 0x-hex"); };
  auto add_smoothing = [&](CLI::App* s) {
    s->add_option("--smoothing", c.smoothing, "Offset mode")->check(CLI::IsMember(modes));
  };
  auto add_estimator = [&](CLI::App* s) {
    s->add_option("--estimator", c.estimator, "Estimator id")->check(CLI::IsMember(estimators));
  };
  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats));
  };
  auto add_threads = [&](CLI::App* s) { s->add_option("--threads", c.threads, "Worker threads (0 = all cores)"); };

  auto* est = app.add_subcommand("estimate", "Sketch newline-delimited input and print the estimate");
  add_kind(est), add_m(est), add_tau(est), add_seed(est), add_smoothing(est), add_estimator(est), add_format(est);
  est->add_option("--output", c.output, "Also write the sketch to PATH");
  est->add_flag("--empty-as-zero", c.empty_as_zero, "Treat empty LogLog registers as X = 0");
  est->add_option("input", c.inputs, "Input path or - for stdin")->expected(0, 1);

  auto* mrg = app.add_subcommand("merge", "Merge compatible sketch files");
  mrg->add_option("--output", c.output, "Destination path")->required();
  mrg->add_option("inputs", c.inputs, "Sketch files")->required();

  auto* ins = app.add_subcommand("inspect", "Estimate from a sketch file");
  add_tau(ins), add_estimator(ins), add_format(ins);
  ins->add_flag("--empty-as-zero", c.empty_as_zero, "Treat empty LogLog registers as X = 0");
  ins->add_option("input", c.inputs, "Sketch file or -")->required();

  auto* curve = app.add_subcommand("variance-curve", "Limiting m * relative variance against tau, as CSV");
  add_kind(curve);
  curve->add_option("--format", c.format, "Output format")->check(CLI::IsMember(std::vector<std::string>{"csv"}));
  curve->add_option("--tau-min", c.tau_min, "Smallest tau");
  curve->add_option("--tau-max", c.tau_max, "Largest tau");
  curve->add_option("--steps", c.steps, "Number of rows");

  auto* sim = app.add_subcommand("simulate", "Poissonized Monte Carlo against the closed forms");
  add_kind(sim), add_m(sim), add_tau(sim), add_seed(sim), add_smoothing(sim), add_estimator(sim), add_format(sim),
      add_threads(sim);
  sim->add_option("--trials", c.trials, "Number of trials");
  sim->add_option("--lambda", c.lambda, "Poisson intensity");
  sim->add_flag("--gra", c.gra, "Report the normalized tau-GRA moments instead of the estimator");

  auto* opt = app.add_subcommand("optimize-tau", "Print tau*, v* and the gap to the Cramer-Rao constant");
  add_kind(opt), add_format(opt);

  auto* cal = app.add_subcommand("calibrate", "Monte Carlo calibration of the fm / lang constants");
  add_m(cal), add_seed(cal), add_format(cal), add_threads(cal);
  cal->add_option("--estimator", c.estimator, "fm or lang")->required();
  cal->add_option("--trials", c.trials, "Number of trials");

  for (auto* s : {est, ins, sim, opt, cal}) s->callback([&c, s] { c.subcommand = s->get_name(); });
  curve->callback([&c] { c.subcommand = "variance-curve"; });
  mrg->callback([&c] { c.subcommand = "merge"; });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
    if (c.format.empty()) c.format = c.subcommand == "variance-curve" ? "csv" : "text";
    if (c.subcommand == "calibrate" && cal->count("--m") == 0) c.m = 1024;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (c.subcommand == "estimate") return detail::cmd_estimate(c, in, out);
    if (c.subcommand == "merge") return detail::cmd_merge(c, in, out);
    if (c.subcommand == "inspect") return detail::cmd_inspect(c, in, out);
    if (c.subcommand == "variance-curve") return detail::cmd_variance_curve(c, out);
    if (c.subcommand == "simulate") return detail::cmd_simulate(c, out);
    if (c.subcommand == "optimize-tau") return detail::cmd_optimize_tau(c, out);
    if (c.subcommand == "calibrate") return detail::cmd_calibrate(c, out);
  } catch (const UsageError& e) {
    err << "grsk: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "grsk: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  err << "grsk: no subcommand\n";
  return kUsage;
}

}  // namespace grsk::cli

#endif  // GRSK_TOOLS_GRSK_CLI_HPP_
