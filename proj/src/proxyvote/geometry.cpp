// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "proxyvote/error.hpp"

namespace proxyvote {

namespace {

void require_direction(Direction2 v) {
  if (!(v.norm() >= kEpsNorm)) {
    std::ostringstream msg;
    msg << "direction (" << v.vx << ", " << v.vy << ") has norm below "
        << kEpsNorm;
    throw Error(ErrorCode::DegenerateDirection, msg.str());
  }
}

}  // namespace

double Direction2::norm() const { return std::hypot(vx, vy); }

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

Direction2 unit_direction(Point2 p, Point2 k) {
  const double dx = k.x - p.x;
  const double dy = k.y - p.y;
  const double n = std::hypot(dx, dy);
  if (n == 0.0) {
    throw Error(ErrorCode::DegenerateInput,
                "unit_direction: pixel and keypoint coincide");
  }
  return {dx / n, dy / n};
}

double point_line_distance(Point2 p, Direction2 v, Point2 k) {
  require_direction(v);
  const double numer = v.vy * k.x - v.vx * k.y + v.vx * p.y - v.vy * p.x;
  return std::abs(numer) / v.norm();
}

Point2 foot_of_perpendicular(Point2 p, Direction2 v, Point2 k) {
  require_direction(v);
  const double n2 = v.vx * v.vx + v.vy * v.vy;
  const double t = ((k.x - p.x) * v.vx + (k.y - p.y) * v.vy) / n2;
  return {p.x + t * v.vx, p.y + t * v.vy};
}

std::optional<Point2> ray_intersection(Point2 p1, Direction2 v1, Point2 p2,
                                       Direction2 v2) {
  const double n1 = v1.norm();
  const double n2 = v2.norm();
  if (n1 < kEpsNorm || n2 < kEpsNorm) return std::nullopt;
  const double cross = v1.vx * v2.vy - v1.vy * v2.vx;
  if (std::abs(cross) / (n1 * n2) < kEpsParallel) return std::nullopt;
  // p1 + s v1 = p2 + t v2  =>  s = cross(p2 - p1, v2) / cross(v1, v2)
  const double dx = p2.x - p1.x;
  const double dy = p2.y - p1.y;
  const double s = (dx * v2.vy - dy * v2.vx) / cross;
  return Point2{p1.x + s * v1.vx, p1.y + s * v1.vy};
}

Point2 project(const Pose& pose, const Intrinsics& intr, const Point3& X) {
  const Eigen::Vector3d c = pose.apply(X);
  if (!(c.z() > 0.0)) {
    std::ostringstream msg;
    msg << "point (" << X.x << ", " << X.y << ", " << X.z
        << ") has camera depth " << c.z();
    throw Error(ErrorCode::BehindCamera, msg.str());
  }
  return {intr.fx * c.x() / c.z() + intr.cx, intr.fy * c.y() / c.z() + intr.cy};
}

double rotation_angle_between(const Eigen::Matrix3d& a,
                              const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d rel = a.transpose() * b;
  // acos loses precision near zero; use the antisymmetric part as well.
  const double c = (rel.trace() - 1.0) * 0.5;
  const Eigen::Vector3d axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                             rel(1, 0) - rel(0, 1));
  const double s = 0.5 * axis.norm();
  return std::atan2(s, std::clamp(c, -1.0, 1.0));
}

}  // namespace proxyvote
