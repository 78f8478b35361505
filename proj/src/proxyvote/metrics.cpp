// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/metrics.hpp"

#include <limits>
#include <vector>

#include "proxyvote/error.hpp"

namespace proxyvote {

namespace {

void require_points(std::span<const Point3> points) {
  if (points.empty()) {
    throw Error(ErrorCode::TooFewPoints, "metrics: empty point set");
  }
}

}  // namespace

double add_score(const Pose& gt, const Pose& est,
                 std::span<const Point3> points) {
  require_points(points);
  double sum = 0.0;
  for (const Point3& X : points) sum += (gt.apply(X) - est.apply(X)).norm();
  return sum / static_cast<double>(points.size());
}

double add_s_score(const Pose& gt, const Pose& est,
                   std::span<const Point3> points) {
  require_points(points);
  std::vector<Eigen::Vector3d> moved;
  moved.reserve(points.size());
  for (const Point3& Y : points) moved.push_back(est.apply(Y));
  double sum = 0.0;
  for (const Point3& X : points) {
    const Eigen::Vector3d g = gt.apply(X);
    double best = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d& e : moved) best = std::min(best, (g - e).squaredNorm());
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(points.size());
}

double proj2d_error(const Pose& gt, const Pose& est,
                    std::span<const Point3> points, const Intrinsics& intr) {
  require_points(points);
  double sum = 0.0;
  for (const Point3& X : points) {
    sum += distance(project(gt, intr, X), project(est, intr, X));
  }
  return sum / static_cast<double>(points.size());
}

Judgement judge(double add, double diameter, double proj) {
  if (!(diameter > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "judge: diameter must be positive");
  }
  return {add < kAddDiameterFraction * diameter, proj < kProjectionThresholdPx};
}

EvalRecord evaluate_pose(const Pose& gt, const Pose& est,
                         std::span<const Point3> points, const Intrinsics& intr,
                         double diameter, bool symmetric) {
  EvalRecord rec;
  rec.add = add_score(gt, est, points);
  rec.add_s = add_s_score(gt, est, points);
  rec.proj2d = proj2d_error(gt, est, points, intr);
  const Judgement j = judge(symmetric ? rec.add_s : rec.add, diameter, rec.proj2d);
  rec.add_correct = j.add_correct;
  rec.proj_correct = j.proj_correct;
  return rec;
}

}  // namespace proxyvote
