// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "proxyvote/error.hpp"
#include "proxyvote/geometry.hpp"
#include "support/test_support.hpp"

using namespace proxyvote;
using pvtest::arr;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST(UnitDirection, ThreeFourFive) {
  const Direction2 u = unit_direction({0, 0}, {3, 4});
  EXPECT_DOUBLE_EQ(u.vx, 0.6);
  EXPECT_DOUBLE_EQ(u.vy, 0.8);
}

TEST(UnitDirection, AxisAligned) {
  const Direction2 u = unit_direction({5, 5}, {5, 9});
  EXPECT_DOUBLE_EQ(u.vx, 0.0);
  EXPECT_DOUBLE_EQ(u.vy, 1.0);
}

TEST(UnitDirection, CoincidentPointsRejected) {
  EXPECT_EQ(code_of([] { unit_direction({1, 1}, {1, 1}); }), ErrorCode::DegenerateInput);
}

TEST(PointLineDistance, PerpendicularAxis) {
  EXPECT_DOUBLE_EQ(point_line_distance({0, 0}, {1, 0}, {0, 5}), 5.0);
}

TEST(PointLineDistance, PointOnLine) {
  const Point2 p{0, 0}, k{7, 2};
  EXPECT_NEAR(point_line_distance(p, unit_direction(p, k), k), 0.0, 1e-12);
}

TEST(PointLineDistance, MatchesDenseScan) {
  const Point2 p{2, 3}, k{6, 9};
  const Direction2 v{2, 1};
  const double analytic = point_line_distance(p, v, k);
  const double scanned = oracle::line_distance(arr(p), arr(v), arr(k));
  EXPECT_GE(scanned, analytic - 1e-9);
  EXPECT_LT(scanned - analytic, 1e-4);
}

TEST(PointLineDistance, ZeroDirectionRejected) {
  EXPECT_EQ(code_of([] { point_line_distance({0, 0}, {0, 0}, {1, 1}); }),
            ErrorCode::DegenerateDirection);
}

TEST(PointLineDistance, RandomCasesBracketedByScan) {
  pvtest::Gen g(11);
  for (int i = 0; i < 200; ++i) {
    const Point2 p = g.point(0, 64), k = g.point(0, 64);
    const Direction2 v = g.direction();
    const double analytic = point_line_distance(p, v, k);
    const double scanned = oracle::line_distance(arr(p), arr(v), arr(k));
    ASSERT_GE(scanned, analytic - 1e-9) << i;
    ASSERT_LT(scanned - analytic, 1e-4) << i;
  }
}

TEST(FootOfPerpendicular, ProjectionOntoXAxis) {
  const Point2 f = foot_of_perpendicular({0, 0}, {1, 0}, {3, 5});
  EXPECT_DOUBLE_EQ(f.x, 3.0);
  EXPECT_DOUBLE_EQ(f.y, 0.0);
}

TEST(FootOfPerpendicular, KeypointOnLineIsItsOwnFoot) {
  const Point2 p{1, 2}, k{4, 6};
  const Point2 f = foot_of_perpendicular(p, unit_direction(p, k), k);
  EXPECT_NEAR(f.x, k.x, 1e-12);
  EXPECT_NEAR(f.y, k.y, 1e-12);
}

TEST(FootOfPerpendicular, MatchesDenseScan) {
  pvtest::Gen g(12);
  for (int i = 0; i < 100; ++i) {
    const Point2 p = g.point(0, 64), k = g.point(0, 64);
    const Direction2 v = g.direction();
    const Point2 f = foot_of_perpendicular(p, v, k);
    const auto o = oracle::line_closest_point(arr(p), arr(v), arr(k));
    ASSERT_NEAR(f.x, o[0], 1e-6) << i;
    ASSERT_NEAR(f.y, o[1], 1e-6) << i;
    ASSERT_NEAR(distance(f, k), point_line_distance(p, v, k), 1e-9);
  }
}

TEST(RayIntersection, AxisLines) {
  const auto x = ray_intersection({0, 0}, {1, 0}, {4, -2}, {0, 1});
  ASSERT_TRUE(x.has_value());
  EXPECT_DOUBLE_EQ(x->x, 4.0);
  EXPECT_DOUBLE_EQ(x->y, 0.0);
}

TEST(RayIntersection, ParallelLinesHaveNone) {
  EXPECT_FALSE(ray_intersection({0, 0}, {1, 1}, {3, 0}, {2, 2}).has_value());
  EXPECT_FALSE(ray_intersection({0, 0}, {1, 1}, {3, 0}, {-1, -1}).has_value());
}

TEST(RayIntersection, ExactDirectionsMeetAtKeypoint) {
  pvtest::Gen g(13);
  for (int i = 0; i < 100; ++i) {
    const Point2 k = g.point(0, 64), p1 = g.point(0, 64), p2 = g.point(0, 64);
    const auto x = ray_intersection(p1, unit_direction(p1, k), p2, unit_direction(p2, k));
    if (!x) continue;
    ASSERT_NEAR(x->x, k.x, 1e-9);
    ASSERT_NEAR(x->y, k.y, 1e-9);
  }
}

TEST(Project, OpticalAxis) {
  Pose pose;
  pose.translation = {0, 0, 1};
  const Intrinsics intr{100, 100, 64, 64};
  const Point2 a = project(pose, intr, {0, 0, 0});
  EXPECT_DOUBLE_EQ(a.x, 64.0);
  EXPECT_DOUBLE_EQ(a.y, 64.0);
  const Point2 b = project(pose, intr, {0.1, 0, 0});
  EXPECT_DOUBLE_EQ(b.x, 74.0);
  EXPECT_DOUBLE_EQ(b.y, 64.0);
}

TEST(Project, BehindCameraRejected) {
  Pose pose;
  pose.translation = {0, 0, -1};
  EXPECT_EQ(code_of([&] { project(pose, {100, 100, 64, 64}, {0, 0, 0}); }),
            ErrorCode::BehindCamera);
}

TEST(Project, MatchesIndependentProjection) {
  pvtest::Gen g(14);
  for (int i = 0; i < 500; ++i) {
    Pose pose;
    pose.rotation = g.rotation();
    pose.translation = {g.uniform(-0.2, 0.2), g.uniform(-0.2, 0.2), g.uniform(1.0, 3.0)};
    const Point3 X{g.uniform(-0.1, 0.1), g.uniform(-0.1, 0.1), g.uniform(-0.1, 0.1)};
    const Intrinsics intr{g.uniform(100, 600), g.uniform(100, 600), g.uniform(0, 128),
                          g.uniform(0, 128)};
    const Point2 a = project(pose, intr, X);
    const auto b = oracle::project(arr(pose.rotation), arr(pose.translation), intr.fx, intr.fy,
                                   intr.cx, intr.cy, arr(X));
    ASSERT_NEAR(a.x, b[0], 1e-9);
    ASSERT_NEAR(a.y, b[1], 1e-9);
  }
}

TEST(RotationAngle, KnownAngle) {
  const Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d b = Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  EXPECT_NEAR(rotation_angle_between(a, b), 0.3, 1e-12);
  EXPECT_NEAR(rotation_angle_between(a, a), 0.0, 1e-15);
}

TEST(PoseValidity, DetectsReflection) {
  Pose p;
  EXPECT_TRUE(p.is_valid());
  p.rotation(0, 0) = -1.0;
  EXPECT_FALSE(p.is_valid());
}
