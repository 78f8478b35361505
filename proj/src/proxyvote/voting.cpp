// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/voting.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "proxyvote/error.hpp"
#include "proxyvote/random.hpp"

namespace proxyvote {

namespace {

void check_inputs(const VectorField& field, const Mask& mask,
                  std::size_t masked) {
  if (!field.same_shape(mask)) {
    throw Error(ErrorCode::DimensionMismatch, "voting: field/mask shapes differ");
  }
  if (masked < 2) {
    std::ostringstream msg;
    msg << "voting needs at least 2 masked pixels, got " << masked;
    throw Error(ErrorCode::InsufficientSupport, msg.str());
  }
}

bool lex_less(Point2 a, Point2 b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

std::vector<Hypothesis> generate_hypotheses(const VectorField& field,
                                            const Mask& mask,
                                            const VotingConfig& cfg) {
  const std::vector<std::size_t> pixels = mask.indices();
  check_inputs(field, mask, pixels.size());
  if (!cfg.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "voting: invalid configuration");
  }
  Rng rng(cfg.rng_seed);
  std::vector<Hypothesis> out;
  out.reserve(cfg.num_samples);
  for (std::size_t s = 0; s < cfg.num_samples; ++s) {
    const std::size_t a = rng.index(pixels.size());
    std::size_t b = rng.index(pixels.size() - 1);
    if (b >= a) ++b;
    const std::size_t ia = pixels[a];
    const std::size_t ib = pixels[b];
    if (auto h = ray_intersection(field.center(ia), field[ia], field.center(ib),
                                  field[ib])) {
      out.push_back({*h, 0});
    }
  }
  return out;
}

std::vector<std::size_t> inlier_pixels(Point2 h, const VectorField& field,
                                       const Mask& mask, double cos_threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!mask.contains(i)) continue;
    const Direction2 v = field[i];
    const double vn = v.norm();
    if (!(vn >= kEpsNorm)) continue;
    const Point2 p = field.center(i);
    const double dx = h.x - p.x;
    const double dy = h.y - p.y;
    const double dn = std::hypot(dx, dy);
    if (dn < kMinVoteDistance) continue;
    if ((v.vx * dx + v.vy * dy) / (vn * dn) >= cos_threshold) out.push_back(i);
  }
  return out;
}

std::size_t count_inliers(Point2 h, const VectorField& field, const Mask& mask,
                          double cos_threshold) {
  if (!field.same_shape(mask)) {
    throw Error(ErrorCode::DimensionMismatch, "voting: field/mask shapes differ");
  }
  return inlier_pixels(h, field, mask, cos_threshold).size();
}

std::optional<Point2> least_squares_intersection(
    const VectorField& field, std::span<const std::size_t> pixels) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (std::size_t i : pixels) {
    const Direction2 v = field[i];
    const double vn = v.norm();
    if (!(vn >= kEpsNorm)) continue;
    const Eigen::Vector2d n(v.vx / vn, v.vy / vn);
    const Eigen::Matrix2d P = Eigen::Matrix2d::Identity() - n * n.transpose();
    const Point2 p = field.center(i);
    A += P;
    b += P * Eigen::Vector2d(p.x, p.y);
  }
  // A is symmetric positive semi-definite.
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  if (!(lo > 0.0) || hi / lo > kMaxRefineCondition) return std::nullopt;
  const Eigen::Vector2d x = A.ldlt().solve(b);
  if (!x.allFinite()) return std::nullopt;
  return Point2{x.x(), x.y()};
}

double sum_squared_line_distance(Point2 x, const VectorField& field,
                                 std::span<const std::size_t> pixels) {
  double total = 0.0;
  for (std::size_t i : pixels) {
    if (!(field[i].norm() >= kEpsNorm)) continue;
    const double d = point_line_distance(field.center(i), field[i], x);
    total += d * d;
  }
  return total;
}

VoteResult vote_keypoint(const VectorField& field, const Mask& mask,
                         const VotingConfig& cfg) {
  std::vector<Hypothesis> hyps = generate_hypotheses(field, mask, cfg);
  if (hyps.empty()) {
    throw Error(ErrorCode::NoValidHypothesis,
                "voting: every sampled pixel pair was parallel or degenerate");
  }
  for (Hypothesis& h : hyps) {
    h.votes = count_inliers(h.location, field, mask, cfg.inlier_cos_threshold);
  }
  const Hypothesis* best = &hyps.front();
  for (const Hypothesis& h : hyps) {
    if (h.votes > best->votes ||
        (h.votes == best->votes && lex_less(h.location, best->location))) {
      best = &h;
    }
  }

  VoteResult result{best->location, best->votes, best->location, false};
  if (!cfg.refine) return result;

  const std::vector<std::size_t> inliers =
      inlier_pixels(best->location, field, mask, cfg.inlier_cos_threshold);
  if (inliers.size() < 2) return result;
  const auto refined = least_squares_intersection(field, inliers);
  if (!refined) return result;
  result.location = *refined;
  result.votes =
      count_inliers(*refined, field, mask, cfg.inlier_cos_threshold);
  result.refined = true;
  return result;
}

}  // namespace proxyvote
