// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace proxyvote {

/// Seeded generator whose derived draws (uniform, index, normal) are computed
/// here rather than by <random> distributions, so streams are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller; consumes two raw draws per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent sub-stream seed from a base seed, a stream name and
/// an index ("scene", "noise", "voting", "init", ...).
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace proxyvote
