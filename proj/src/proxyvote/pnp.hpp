// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "proxyvote/geometry.hpp"

namespace proxyvote {

/// Model-frame 3D point paired with its observed image location.
struct Correspondence {
  Point3 object_point;
  Point2 image_point;
};

/// Control-point covariance ratio below which the object points are treated
/// as planar and the three-control-point variant is used.
inline constexpr double kPlanarEigenRatio = 1e-8;

/// EPnP (Lepetit, Moreno-Noguer, Fua). Needs at least 4 correspondences.
/// Throws TooFewPoints or DegenerateConfiguration.
Pose solve_epnp(std::span<const Correspondence> corrs, const Intrinsics& intr);

/// Root-mean-square pixel reprojection error. Throws BehindCamera.
double reprojection_rmse(const Pose& pose, std::span<const Correspondence> corrs,
                         const Intrinsics& intr);

struct PoseRefinement {
  Pose pose;
  /// RMSE of the initial pose followed by the RMSE after each outer iteration.
  std::vector<double> rmse_history;
};

/// Levenberg-Marquardt on reprojection residuals. Steps that do not lower the
/// RMSE are rejected, so the result is never worse than `init`.
PoseRefinement refine_pose_with_history(const Pose& init,
                                        std::span<const Correspondence> corrs,
                                        const Intrinsics& intr, int iters);

Pose refine_pose(const Pose& init, std::span<const Correspondence> corrs,
                 const Intrinsics& intr, int iters);

/// Rodrigues exponential of an axis-angle vector.
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& w);

}  // namespace proxyvote
