// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "proxyvote/error.hpp"

namespace proxyvote {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    std::ostringstream msg;
    msg << what << ": " << a.width() << "x" << a.height() << " vs "
        << b.width() << "x" << b.height();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

double clamp_score(double s) {
  return std::clamp(s, kSegScoreFloor, 1.0 - kSegScoreFloor);
}

}  // namespace

ScalarLoss smooth_l1(double a) {
  if (std::abs(a) < 1.0) return {0.5 * a * a, a};
  return {std::abs(a) - 0.5, sign(a)};
}

LossReport vf_loss(const VectorField& est, const VectorField& gt,
                   const Mask& mask) {
  require_same_shape(est, gt, "vf_loss field shapes");
  require_same_shape(est, mask, "vf_loss field/mask shapes");
  LossReport out{0.0, VectorField(est.width(), est.height()), 0};
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!mask.contains(i)) continue;
    const double rx = est[i].vx - gt[i].vx;
    const double ry = est[i].vy - gt[i].vy;
    const ScalarLoss l = smooth_l1(std::abs(rx) + std::abs(ry));
    out.value += l.value;
    out.grad[i] = {l.derivative * sign(rx), l.derivative * sign(ry)};
  }
  return out;
}

LossReport dpvl(const VectorField& est, const Mask& mask, Point2 keypoint) {
  require_same_shape(est, mask, "dpvl field/mask shapes");
  LossReport out{0.0, VectorField(est.width(), est.height()), 0};
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!mask.contains(i)) continue;
    const Direction2 v = est[i];
    const double norm = v.norm();
    if (!(norm >= kEpsNorm)) {
      ++out.skipped;
      continue;
    }
    const Point2 p = est.center(i);
    const double wx = p.y - keypoint.y;
    const double wy = keypoint.x - p.x;
    const double n = v.vx * wx + v.vy * wy;
    const double d = std::abs(n) / norm;
    if (d < kProxyZeroTol) continue;
    const ScalarLoss l = smooth_l1(d);
    out.value += l.value;
    const double s = sign(n) / norm;
    const double r = std::abs(n) / (norm * norm * norm);
    out.grad[i] = {l.derivative * (s * wx - r * v.vx),
                   l.derivative * (s * wy - r * v.vy)};
  }
  return out;
}

ProxyDistanceStats proxy_distance(const VectorField& est, const Mask& mask,
                                  Point2 keypoint) {
  require_same_shape(est, mask, "proxy_distance field/mask shapes");
  ProxyDistanceStats out;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!mask.contains(i) || !(est[i].norm() >= kEpsNorm)) continue;
    out.sum += point_line_distance(est.center(i), est[i], keypoint);
    ++out.count;
  }
  return out;
}

double seg_loss(const SegScores& scores, const Mask& mask) {
  require_same_shape(scores, mask, "seg_loss shapes");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (mask.contains(i)) total -= std::log(clamp_score(scores[i]));
  }
  return total;
}

double seg_loss_two_class(const SegScores& scores, const Mask& mask) {
  require_same_shape(scores, mask, "seg_loss shapes");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = clamp_score(scores[i]);
    total -= mask.contains(i) ? std::log(s) : std::log(1.0 - s);
  }
  return total;
}

double total_loss(double seg, double vf, double pv, double alpha,
                  double beta) {
  return alpha * seg + vf + beta * pv;
}

LossWeights schedule_weights(int epoch, const WeightSchedule& sched) {
  if (epoch < 0) {
    throw Error(ErrorCode::InvalidArgument, "schedule_weights: negative epoch");
  }
  const double e = static_cast<double>(epoch);
  return {std::min(sched.alpha0 * std::pow(sched.alpha_factor, e),
                   sched.alpha_cap),
          std::min(sched.beta0 * std::pow(sched.beta_factor, e),
                   sched.beta_cap)};
}

}  // namespace proxyvote
