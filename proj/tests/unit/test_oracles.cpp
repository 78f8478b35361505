// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

// The oracles are themselves checked on cases with closed-form answers.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"

TEST(OracleLineDistance, AxisCase) {
  EXPECT_NEAR(oracle::line_distance({0, 0}, {1, 0}, {3, 5}), 5.0, 1e-9);
  const auto c = oracle::line_closest_point({0, 0}, {1, 0}, {3, 5});
  EXPECT_NEAR(c[0], 3.0, 1e-6);
  EXPECT_NEAR(c[1], 0.0, 1e-12);
}

TEST(OracleLineDistance, PointOnLine) {
  EXPECT_NEAR(oracle::line_distance({1, 1}, {2, 2}, {4, 4}), 0.0, 1e-9);
}

TEST(OracleLineDistance, DiagonalClosedForm) {
  // Line y = x, point (0, 2): distance sqrt(2).
  EXPECT_NEAR(oracle::line_distance({0, 0}, {0.3, 0.3}, {0, 2}), std::sqrt(2.0), 1e-9);
}

TEST(OracleFd, SmoothL1Derivative) {
  const auto smooth_l1 = [](const std::vector<double>& x) {
    const double a = std::abs(x[0]);
    return a < 1.0 ? 0.5 * a * a : a - 0.5;
  };
  const auto g = oracle::fd_gradient(smooth_l1, {0.5}, {true}, 1e-6);
  EXPECT_NEAR(g[0], 0.5, 1e-8);
  const auto g2 = oracle::fd_gradient(smooth_l1, {-3.0}, {true}, 1e-6);
  EXPECT_NEAR(g2[0], -1.0, 1e-8);
}

TEST(OracleFd, InactiveEntriesZeroAndStepChecked) {
  const auto f = [](const std::vector<double>& x) { return x[0] * x[1]; };
  const auto g = oracle::fd_gradient(f, {2.0, 3.0}, {true, false}, 1e-6);
  EXPECT_NEAR(g[0], 3.0, 1e-8);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_THROW(oracle::fd_gradient(f, {2.0, 3.0}, {true, true}, 1e-2), std::invalid_argument);
}

namespace {

void exact_field(int w, int h, std::array<double, 2> k, double radius, std::vector<double>& field,
                 std::vector<std::uint8_t>& mask) {
  field.assign(2 * w * h, 0.0);
  mask.assign(w * h, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double x = c + 0.5, y = r + 0.5;
      if (std::hypot(x - w / 2.0, y - h / 2.0) > radius) continue;
      const double dx = k[0] - x, dy = k[1] - y, n = std::hypot(dx, dy);
      if (n < 1e-9) continue;
      mask[r * w + c] = 1;
      field[2 * (r * w + c)] = dx / n;
      field[2 * (r * w + c) + 1] = dy / n;
    }
  }
}

}  // namespace

TEST(OracleAllPairs, ExactFieldEveryHypothesisAtKeypoint) {
  std::vector<double> field;
  std::vector<std::uint8_t> mask;
  const std::array<double, 2> k{7.0, 9.0};  // no pixel center within 0.5 px
  exact_field(16, 16, k, 5, field, mask);
  const auto s = oracle::all_pairs_vote(16, 16, field, mask, k, true);
  ASSERT_GT(s.hypotheses.size(), 100u);
  for (const auto& h : s.hypotheses) {
    ASSERT_NEAR(h[0], k[0], 1e-9);
    ASSERT_NEAR(h[1], k[1], 1e-9);
  }
  EXPECT_NEAR(s.median_distance, 0.0, 1e-9);
  EXPECT_EQ(s.best_inliers, s.masked);
}

TEST(OracleAllPairs, ParallelFieldHasNoHypotheses) {
  std::vector<double> field(2 * 64, 0.0);
  std::vector<std::uint8_t> mask(64, 1);
  for (int i = 0; i < 64; ++i) field[2 * i] = 1.0;
  const auto s = oracle::all_pairs_vote(8, 8, field, mask, {0, 0}, false);
  EXPECT_TRUE(s.hypotheses.empty());
}

TEST(OracleAllPairs, RejectsLargeMasks) {
  std::vector<double> field(2 * 50 * 50, 1.0);
  std::vector<std::uint8_t> mask(50 * 50, 1);
  EXPECT_THROW(oracle::all_pairs_vote(50, 50, field, mask, {0, 0}, false), std::length_error);
}

TEST(OracleFps, DetectsNonGreedySelection) {
  const std::vector<std::array<double, 3>> pts{{0, 0, 0}, {1, 0, 0}, {5, 0, 0}};
  EXPECT_TRUE(oracle::verify_fps(pts, {0, 2, 1}).pass);
  EXPECT_FALSE(oracle::verify_fps(pts, {0, 1, 2}).pass);
}

TEST(OracleMetrics, ClosedForms) {
  const std::array<double, 9> I{1, 0, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<std::array<double, 3>> pts{{1, 0, 0}, {-1, 0, 0}};
  EXPECT_DOUBLE_EQ(oracle::add(I, {0, 0, 0}, I, {0, 0, 2}, pts), 2.0);
  const std::array<double, 9> Rz180{-1, 0, 0, 0, -1, 0, 0, 0, 1};
  EXPECT_DOUBLE_EQ(oracle::add(I, {0, 0, 0}, Rz180, {0, 0, 0}, pts), 2.0);
  EXPECT_DOUBLE_EQ(oracle::add_s(I, {0, 0, 0}, Rz180, {0, 0, 0}, pts), 0.0);
  EXPECT_DOUBLE_EQ(oracle::diameter({{0, 0, 0}, {1, 1, 1}, {0.5, 0.5, 0}}), std::sqrt(3.0));
  const auto u = oracle::project(I, {0, 0, 2}, 100, 100, 50, 40, {0.2, -0.4, 0});
  EXPECT_DOUBLE_EQ(u[0], 60.0);
  EXPECT_DOUBLE_EQ(u[1], 20.0);
}

TEST(OracleCompare, AbsAndRel) {
  EXPECT_TRUE(oracle::compare_abs(1.0, 1.05, 0.1).pass);
  EXPECT_FALSE(oracle::compare_abs(1.0, 1.2, 0.1).pass);
  EXPECT_TRUE(oracle::compare_rel(1000.0, 1000.5, 1e-3).pass);
  EXPECT_FALSE(oracle::compare_rel(1000.0, 1002.0, 1e-3).pass);
}
