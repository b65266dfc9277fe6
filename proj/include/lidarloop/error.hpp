// Copyright 2026 The lidarloop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lidarloop {

enum class ErrorCode {
  invalid_argument,
  precondition,
  io,
  format,
  dimension_mismatch,
  numeric,
};

/// Library-wide exception type. The C API maps the code to ll_status values.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool condition, ErrorCode code, const std::string& msg) {
  if (!condition) fail(code, msg);
}

}  // namespace lidarloop
