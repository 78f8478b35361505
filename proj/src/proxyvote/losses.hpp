// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "proxyvote/field.hpp"
#include "proxyvote/geometry.hpp"

namespace proxyvote {

/// Clamp applied to segmentation scores before taking logs.
inline constexpr double kSegScoreFloor = 1e-7;
/// Proxy distances below this (in pixels) are round-off on an exact line and
/// count as zero, so an exact field is a fixed point of adaptive optimizers.
inline constexpr double kProxyZeroTol = 1e-12;

struct ScalarLoss {
  double value = 0.0;
  double derivative = 0.0;
};

/// Loss value together with its gradient with respect to the estimated field.
struct LossReport {
  double value = 0.0;
  /// (dL/dvx, dL/dvy) per pixel; zero outside the mask.
  VectorField grad;
  /// Masked pixels skipped because |v| < kEpsNorm.
  std::size_t skipped = 0;
};

/// Geometric growth schedule for the segmentation weight alpha and the
/// proxy-voting weight beta, stepped once per epoch.
struct WeightSchedule {
  double alpha0 = 1.0;
  double alpha_factor = 1.1;
  double alpha_cap = 10.0;
  double beta0 = 1e-3;
  double beta_factor = 1.5;
  double beta_cap = 1e-2;

  bool is_valid() const {
    return alpha_factor >= 1.0 && beta_factor >= 1.0 && alpha_cap >= alpha0 &&
           beta_cap >= beta0;
  }
};

struct LossWeights {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Smooth l1: 0.5 a^2 for |a| < 1, |a| - 0.5 otherwise.
ScalarLoss smooth_l1(double a);

/// Vector-field regression loss: sum over masked p of
/// smooth_l1(|u.x - v.x| + |u.y - v.y|), i.e. smooth l1 of the per-pixel
/// l1 residual norm.
LossReport vf_loss(const VectorField& est, const VectorField& gt,
                   const Mask& mask);

/// Differentiable proxy voting loss for one keypoint: sum over masked p of
/// smooth_l1(d(p, v(p), k)), d being the distance from k to the foot of the
/// perpendicular on the line through p along v(p).
///
/// The gradient goes through the |v| normalization:
///   n = v . w,  w = (p.y - k.y, k.x - p.x),  d = |n| / |v|
///   dd/dv = sign(n) w / |v| - |n| v / |v|^3
/// Pixels with |v| < kEpsNorm contribute nothing and are counted in
/// `skipped`.
LossReport dpvl(const VectorField& est, const Mask& mask, Point2 keypoint);

struct ProxyDistanceStats {
  double sum = 0.0;
  std::size_t count = 0;

  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

/// Sum of unsmoothed proxy distances d(p, v(p), k) over masked,
/// non-degenerate pixels.
ProxyDistanceStats proxy_distance(const VectorField& est, const Mask& mask,
                                  Point2 keypoint);

/// -sum over masked p of log(s(p)), scores clamped to
/// [kSegScoreFloor, 1 - kSegScoreFloor].
double seg_loss(const SegScores& scores, const Mask& mask);

/// Two-class cross entropy: the foreground term of seg_loss plus
/// -sum over unmasked p of log(1 - s(p)).
double seg_loss_two_class(const SegScores& scores, const Mask& mask);

/// alpha * seg + vf + beta * pv.
double total_loss(double seg, double vf, double pv, double alpha, double beta);

LossWeights schedule_weights(int epoch, const WeightSchedule& sched);

}  // namespace proxyvote
