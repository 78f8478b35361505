// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "proxyvote/geometry.hpp"

namespace proxyvote {

inline constexpr double kAddDiameterFraction = 0.1;
inline constexpr double kProjectionThresholdPx = 5.0;

struct EvalRecord {
  double add = 0.0;
  double add_s = 0.0;
  double proj2d = 0.0;
  bool add_correct = false;
  bool proj_correct = false;
};

struct Judgement {
  bool add_correct = false;
  bool proj_correct = false;
};

/// Mean distance between model points under the two poses.
double add_score(const Pose& gt, const Pose& est, std::span<const Point3> points);

/// Mean over X of the closest-point distance min_Y |gt(X) - est(Y)|.
/// O(n^2).
double add_s_score(const Pose& gt, const Pose& est,
                   std::span<const Point3> points);

/// Mean pixel distance between projections under the two poses.
double proj2d_error(const Pose& gt, const Pose& est,
                    std::span<const Point3> points, const Intrinsics& intr);

/// Strict thresholds: add < 0.1 * diameter, proj < 5 px.
Judgement judge(double add, double diameter, double proj);

/// All three scores plus judgements. When `symmetric` is set the ADD verdict
/// is taken on ADD-S.
EvalRecord evaluate_pose(const Pose& gt, const Pose& est,
                         std::span<const Point3> points, const Intrinsics& intr,
                         double diameter, bool symmetric);

}  // namespace proxyvote
