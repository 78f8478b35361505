// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxyvote/field.hpp"
#include "proxyvote/geometry.hpp"
#include "proxyvote/voting.hpp"

namespace proxyvote {

struct KeypointVote {
  Point2 location;
  std::size_t votes = 0;
  bool refined = false;
  /// False when voting raised; `location` is then NaN.
  bool ok = false;
  std::string failure;
};

struct PoseEstimate {
  std::vector<KeypointVote> votes;
  std::optional<Pose> pose;
  std::string failure;
};

/// Votes each field independently. Keypoint k uses the sub-stream
/// derive_seed(cfg.rng_seed, "voting", k).
std::vector<KeypointVote> vote_all(const Mask& mask, std::span<const VectorField> fields,
                                   const VotingConfig& cfg);

/// vote_all followed by EPnP on the keypoints that voted. Never throws for
/// data-dependent failures; those leave `pose` empty and set `failure`.
PoseEstimate estimate_pose(const Mask& mask, std::span<const VectorField> fields,
                           std::span<const Point3> keypoints3, const Intrinsics& intr,
                           const VotingConfig& cfg);

/// Fraction of (keypoint, masked pixel) pairs whose direction points toward
/// the keypoint rather than away from it. Pixels on a keypoint are skipped.
double sign_agreement(const Mask& mask, std::span<const VectorField> fields,
                      std::span<const Point2> keypoints2);

}  // namespace proxyvote
