// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "proxyvote/field.hpp"
#include "proxyvote/geometry.hpp"

namespace proxyvote {

/// Candidate keypoint from the intersection of two pixel lines.
struct Hypothesis {
  Point2 location;
  std::size_t votes = 0;
};

struct VotingConfig {
  std::size_t num_samples = 512;
  double inlier_cos_threshold = 0.99;
  bool refine = true;
  std::uint64_t rng_seed = 0;

  bool is_valid() const {
    return num_samples >= 1 && inlier_cos_threshold > 0.0 &&
           inlier_cos_threshold < 1.0;
  }
};

struct VoteResult {
  Point2 location;
  std::size_t votes = 0;
  /// Best hypothesis before least-squares refinement.
  Point2 unrefined;
  bool refined = false;
};

/// Pixels closer than this to a hypothesis do not vote for it.
inline constexpr double kMinVoteDistance = 0.5;
/// Refinement falls back to the raw hypothesis above this condition number.
inline constexpr double kMaxRefineCondition = 1e8;

/// Draws `cfg.num_samples` distinct masked pixel pairs and intersects their
/// lines. Parallel or degenerate pairs yield nothing, so the result may be
/// shorter than num_samples. Votes are left at zero.
std::vector<Hypothesis> generate_hypotheses(const VectorField& field,
                                            const Mask& mask,
                                            const VotingConfig& cfg);

/// Number of masked pixels whose direction agrees with (h - p) to within the
/// cosine threshold.
std::size_t count_inliers(Point2 h, const VectorField& field, const Mask& mask,
                          double cos_threshold);

/// Masked pixel indices counted by count_inliers.
std::vector<std::size_t> inlier_pixels(Point2 h, const VectorField& field,
                                       const Mask& mask, double cos_threshold);

/// Least-squares intersection of the lines through the given pixels:
/// solves sum (I - n n^T) x = sum (I - n n^T) p with n = v / |v|.
/// Returns nothing when the 2x2 system is singular or ill-conditioned.
std::optional<Point2> least_squares_intersection(
    const VectorField& field, std::span<const std::size_t> pixels);

/// Sum of squared point-line distances from x to the given pixel lines.
double sum_squared_line_distance(Point2 x, const VectorField& field,
                                 std::span<const std::size_t> pixels);

/// RANSAC-style keypoint vote: highest inlier count wins, ties go to the
/// lexicographically smallest (x, y); optionally refined over the winner's
/// inliers and re-scored.
VoteResult vote_keypoint(const VectorField& field, const Mask& mask,
                         const VotingConfig& cfg);

}  // namespace proxyvote
