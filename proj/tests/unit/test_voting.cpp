// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles/oracles.hpp"
#include "proxyvote/error.hpp"
#include "proxyvote/voting.hpp"
#include "support/test_support.hpp"

using namespace proxyvote;

namespace {

VectorField rotate_noise(const VectorField& f, const Mask& m, double sigma_deg,
                         std::uint64_t seed) {
  pvtest::Gen g(seed);
  VectorField out = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!m.contains(i)) continue;
    const double a = sigma_deg * M_PI / 180.0 * g.normal();
    out[i] = {std::cos(a) * f[i].vx - std::sin(a) * f[i].vy,
              std::sin(a) * f[i].vx + std::cos(a) * f[i].vy};
  }
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(Hypotheses, ExactFieldAllAtKeypoint) {
  const Mask m = pvtest::disc_mask(64, 64, 32, 32, 20);
  const Point2 k{27.3, 40.1};
  VotingConfig cfg;
  cfg.rng_seed = 5;
  const auto hyps = generate_hypotheses(pvtest::exact_field(m, k), m, cfg);
  ASSERT_FALSE(hyps.empty());
  for (const Hypothesis& h : hyps) {
    ASSERT_NEAR(h.location.x, k.x, 1e-9);
    ASSERT_NEAR(h.location.y, k.y, 1e-9);
  }
}

TEST(Hypotheses, ParallelFieldGivesNone) {
  const Mask m = pvtest::disc_mask(16, 16, 8, 8, 6);
  VectorField f(16, 16, Direction2{0.6, 0.8});
  EXPECT_TRUE(generate_hypotheses(f, m, VotingConfig{}).empty());
  EXPECT_THROW(vote_keypoint(f, m, VotingConfig{}), Error);
}

TEST(Hypotheses, NoisyScatterMatchesAllPairs) {
  const Mask m = pvtest::disc_mask(64, 64, 32, 32, 18);
  const Point2 k{30.2, 35.7};
  const VectorField f = rotate_noise(pvtest::exact_field(m, k), m, 5.0, 31);
  VotingConfig cfg;
  cfg.num_samples = 4096;
  cfg.rng_seed = 3;
  std::vector<double> d;
  for (const Hypothesis& h : generate_hypotheses(f, m, cfg)) d.push_back(distance(h.location, k));
  const auto all = oracle::all_pairs_vote(64, 64, pvtest::flatten(f), pvtest::mask_bytes(m),
                                          {k.x, k.y}, false);
  ASSERT_GT(all.hypotheses.size(), 100000u);
  const double sampled = median_of(d);
  EXPECT_NEAR(sampled, all.median_distance, 0.1 * all.median_distance)
      << "sampled median " << sampled << " exhaustive " << all.median_distance;
}

TEST(Hypotheses, SameSeedSameHypotheses) {
  const Mask m = pvtest::disc_mask(32, 32, 16, 16, 10);
  const VectorField f = rotate_noise(pvtest::exact_field(m, {12, 18}), m, 5.0, 2);
  VotingConfig cfg;
  cfg.rng_seed = 77;
  const auto a = generate_hypotheses(f, m, cfg);
  const auto b = generate_hypotheses(f, m, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].location, b[i].location);
}

TEST(Inliers, ExactFieldAtKeypointCountsAllButCoincident) {
  const Mask m = pvtest::disc_mask(32, 32, 16, 16, 10);
  const Point2 k{16.5, 16.5};  // center of a masked pixel
  const VectorField f = pvtest::exact_field(m, k);
  EXPECT_EQ(count_inliers(k, f, m, 0.99), m.count() - 1);
}

TEST(Inliers, FarOppositePointHasNone) {
  const Mask m = pvtest::disc_mask(32, 32, 16, 16, 10);
  const VectorField f(32, 32, Direction2{1.0, 0.0});
  EXPECT_EQ(count_inliers({-1000.0, 16.0}, f, m, 0.99), 0u);
}

TEST(Inliers, HalfFlippedMatchesPerPixelCheck) {
  const Mask m = pvtest::disc_mask(32, 32, 16, 16, 12);
  const Point2 k{14.2, 19.9};
  VectorField f = pvtest::exact_field(m, k);
  pvtest::Gen g(8);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.uniform(0, 1) < 0.5) f[i] = -f[i];
  }
  const std::size_t got = count_inliers(k, f, m, 0.99);
  const std::size_t want = oracle::direct_inlier_count(32, 32, pvtest::flatten(f),
                                                       pvtest::mask_bytes(m), {k.x, k.y}, 0.99);
  EXPECT_EQ(got, want);
  EXPECT_NEAR(static_cast<double>(got) / m.count(), 0.5, 0.1);
}

TEST(Vote, ExactFieldRecoversKeypoint) {
  const Mask m = pvtest::disc_mask(64, 64, 32, 32, 20);
  for (const Point2 k : {Point2{31.7, 28.2}, Point2{70.0, -5.0}}) {
    const VoteResult r = vote_keypoint(pvtest::exact_field(m, k), m, VotingConfig{});
    EXPECT_NEAR(r.location.x, k.x, 1e-6);
    EXPECT_NEAR(r.location.y, k.y, 1e-6);
  }
}

TEST(Vote, OccludedRegionStillRecoversKeypoint) {
  const Mask full = pvtest::disc_mask(64, 64, 32, 32, 20);
  const Point2 k{36.4, 25.1};
  Mask visible = full;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < visible.size(); ++i) {
    if (visible.contains(i) && visible.center(i).x < 24.0) {
      visible[i] = 0;
      ++dropped;
    }
  }
  ASSERT_NEAR(static_cast<double>(dropped) / full.count(), 0.3, 0.1);
  const VectorField f = rotate_noise(pvtest::exact_field(full, k), full, 2.0, 4);
  const VoteResult r = vote_keypoint(f, visible, VotingConfig{});
  EXPECT_LT(distance(r.location, k), 1.0);
}

TEST(Vote, ChosenPointInExhaustiveTopDecile) {
  const Mask m = pvtest::disc_mask(16, 16, 8, 8, 6);
  const Point2 k{9.1, 6.4};
  const VectorField f = rotate_noise(pvtest::exact_field(m, k), m, 5.0, 19);
  const auto all = oracle::all_pairs_vote(16, 16, pvtest::flatten(f), pvtest::mask_bytes(m),
                                          {k.x, k.y}, true);
  VotingConfig cfg;
  cfg.refine = false;
  cfg.rng_seed = 6;
  const VoteResult r = vote_keypoint(f, m, cfg);
  const std::size_t direct = oracle::direct_inlier_count(
      16, 16, pvtest::flatten(f), pvtest::mask_bytes(m), {r.location.x, r.location.y}, 0.99);
  EXPECT_EQ(direct, r.votes);
  EXPECT_GE(r.votes, all.top_decile_inliers);
}

TEST(Vote, TooFewPixelsRejected) {
  Mask m(4, 4);
  m[5] = 1;
  try {
    vote_keypoint(VectorField(4, 4, Direction2{1, 0}), m, VotingConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSupport);
  }
}

TEST(LeastSquares, ExactLinesMeetAtKeypoint) {
  const Mask m = pvtest::disc_mask(32, 32, 16, 16, 8);
  const Point2 k{20.25, 11.75};
  const VectorField f = pvtest::exact_field(m, k);
  const auto px = m.indices();
  const auto x = least_squares_intersection(f, px);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR(x->x, k.x, 1e-9);
  EXPECT_NEAR(x->y, k.y, 1e-9);
  EXPECT_NEAR(sum_squared_line_distance(*x, f, px), 0.0, 1e-12);
}

TEST(LeastSquares, ParallelLinesIllConditioned) {
  const Mask m = pvtest::disc_mask(16, 16, 8, 8, 5);
  const VectorField f(16, 16, Direction2{0.0, 1.0});
  const auto px = m.indices();
  EXPECT_FALSE(least_squares_intersection(f, px).has_value());
}
