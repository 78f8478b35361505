// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace proxyvote {

enum class ErrorCode {
  InvalidArgument = 1,
  DegenerateInput,
  DegenerateDirection,
  BehindCamera,
  DimensionMismatch,
  InsufficientSupport,
  NoValidHypothesis,
  TooFewPoints,
  DegenerateConfiguration,
  Parse,
  Io,
  Config,
  Divergence,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every core routine. The C API maps `code()` onto
/// its status enum one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace proxyvote
