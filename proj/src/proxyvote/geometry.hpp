// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include <Eigen/Core>

namespace proxyvote {

/// Norm below which a direction vector is treated as zero.
inline constexpr double kEpsNorm = 1e-8;
/// Normalized cross product below which two lines are treated as parallel.
inline constexpr double kEpsParallel = 1e-6;

/// Image location in continuous pixel coordinates (x right, y down).
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Per-pixel direction estimate. Need not be unit length.
struct Direction2 {
  double vx = 0.0;
  double vy = 0.0;

  double norm() const;
  Direction2 operator-() const { return {-vx, -vy}; }
  friend bool operator==(const Direction2&, const Direction2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Rigid transform from object coordinates to camera coordinates.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Point3& X) const {
    return rotation * X.vec() + translation;
  }

  /// Orthonormal with det = +1 within `tol`.
  bool is_valid(double tol = 1e-9) const;
};

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  bool is_valid() const { return fx > 0.0 && fy > 0.0; }
};

/// Continuous center of pixel (row, col).
inline Point2 pixel_center(int row, int col) {
  return {col + 0.5, row + 0.5};
}

double distance(Point2 a, Point2 b);

/// (k - p) / |k - p|. Throws DegenerateInput when p == k.
Direction2 unit_direction(Point2 p, Point2 k);

/// Perpendicular distance from k to the line through p along v:
/// |v.y k.x - v.x k.y + v.x p.y - v.y p.x| / |v|.
double point_line_distance(Point2 p, Direction2 v, Point2 k);

/// Closest point to k on the line through p along v.
Point2 foot_of_perpendicular(Point2 p, Direction2 v, Point2 k);

/// Intersection of two infinite lines; empty when they are (nearly) parallel
/// or either direction is degenerate.
std::optional<Point2> ray_intersection(Point2 p1, Direction2 v1, Point2 p2,
                                       Direction2 v2);

/// Pinhole projection. Throws BehindCamera for non-positive depth.
Point2 project(const Pose& pose, const Intrinsics& intr, const Point3& X);

/// Geodesic angle (radians) between two rotations.
double rotation_angle_between(const Eigen::Matrix3d& a,
                              const Eigen::Matrix3d& b);

}  // namespace proxyvote
