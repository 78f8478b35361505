// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/error.hpp"

namespace proxyvote {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DegenerateInput: return "degenerate input";
    case ErrorCode::DegenerateDirection: return "degenerate direction";
    case ErrorCode::BehindCamera: return "point behind camera";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::InsufficientSupport: return "insufficient support";
    case ErrorCode::NoValidHypothesis: return "no valid hypothesis";
    case ErrorCode::TooFewPoints: return "too few points";
    case ErrorCode::DegenerateConfiguration: return "degenerate configuration";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Divergence: return "divergence";
  }
  return "unknown error";
}

}  // namespace proxyvote
