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

#ifndef GRSK_ERROR_HPP_
#define GRSK_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace grsk {

enum class ErrorCode {
  invalid_parameter,
  incompatible_sketch,
  corrupt_sketch,
  empty_sketch,
  numerical_failure,
  invalid_window,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::incompatible_sketch: return "incompatible-sketch";
    case ErrorCode::corrupt_sketch: return "corrupt-sketch";
    case ErrorCode::empty_sketch: return "empty-sketch";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::invalid_window: return "invalid-window";
  }
  return "unknown";
}

/// All library failures are reported as grsk::Error carrying a machine-readable code.
/// Corrupt-sketch errors also carry the byte offset at which decoding failed.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::invalid_parameter, message);
}

}  // namespace detail
}  // namespace grsk

#endif  // GRSK_ERROR_HPP_
