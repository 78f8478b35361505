// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/synth.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "proxyvote/error.hpp"

namespace proxyvote {

Intrinsics default_intrinsics(int width, int height) {
  const double f = 2.5 * width;
  return {f, f, 0.5 * width, 0.5 * height};
}

Eigen::Quaterniond random_rotation(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double t2 = 2.0 * std::numbers::pi * u2;
  const double t3 = 2.0 * std::numbers::pi * u3;
  // Eigen's constructor order is (w, x, y, z).
  return Eigen::Quaterniond(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2),
                            b * std::sin(t3));
}

Pose sample_pose(std::uint64_t seed, const PoseRanges& ranges,
                 const ModelCloud& cloud, const Intrinsics& intr, int width,
                 int height) {
  if (!(ranges.z_min > 0.0) || ranges.z_max < ranges.z_min ||
      ranges.x_max < ranges.x_min || ranges.y_max < ranges.y_min) {
    throw Error(ErrorCode::Config, "sample_pose: invalid translation ranges");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxPoseTries; ++attempt) {
    Pose pose;
    pose.rotation = random_rotation(rng).toRotationMatrix();
    pose.translation = {rng.uniform(ranges.x_min, ranges.x_max),
                        rng.uniform(ranges.y_min, ranges.y_max),
                        rng.uniform(ranges.z_min, ranges.z_max)};
    bool inside = true;
    for (const Point3& X : cloud.points) {
      const Eigen::Vector3d c = pose.apply(X);
      if (!(c.z() > 0.0)) {
        inside = false;
        break;
      }
      const double u = intr.fx * c.x() / c.z() + intr.cx;
      const double v = intr.fy * c.y() / c.z() + intr.cy;
      if (u < ranges.margin_px || u > width - ranges.margin_px ||
          v < ranges.margin_px || v > height - ranges.margin_px) {
        inside = false;
        break;
      }
    }
    if (inside) return pose;
  }
  std::ostringstream msg;
  msg << "sample_pose: no pose within the image after " << kMaxPoseTries
      << " draws; widen the image or move the object farther away";
  throw Error(ErrorCode::Config, msg.str());
}

void splat_points(std::span<const Point2> points, Mask& mask) {
  const int reach = static_cast<int>(std::ceil(kSplatRadiusPx));
  for (const Point2& q : points) {
    const int r0 = static_cast<int>(std::floor(q.y)) - reach;
    const int c0 = static_cast<int>(std::floor(q.x)) - reach;
    for (int r = r0; r <= r0 + 2 * reach; ++r) {
      if (r < 0 || r >= mask.height()) continue;
      for (int c = c0; c <= c0 + 2 * reach; ++c) {
        if (c < 0 || c >= mask.width()) continue;
        if (distance(pixel_center(r, c), q) <= kSplatRadiusPx) mask.at(r, c) = 1;
      }
    }
  }
}

std::size_t fill_unit_field(const Mask& mask, Point2 keypoint, VectorField& field) {
  field = VectorField(mask.width(), mask.height());
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.contains(i)) continue;
    const Point2 p = mask.center(i);
    if (distance(p, keypoint) < kCoincidentPx) {
      ++degenerate;
      continue;
    }
    field[i] = unit_direction(p, keypoint);
  }
  return degenerate;
}

SceneSample make_scene(const ModelCloud& cloud, const KeypointSet& keys,
                       const Pose& pose, const Intrinsics& intr, int width,
                       int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "make_scene: image size must be positive");
  }
  if (!pose.is_valid(1e-9)) {
    throw Error(ErrorCode::InvalidArgument, "make_scene: rotation is not orthonormal");
  }
  SceneSample s;
  s.width = width;
  s.height = height;
  s.pose = pose;
  s.intr = intr;
  s.mask = Mask(width, height);

  std::vector<Point2> projected;
  projected.reserve(cloud.points.size());
  for (const Point3& X : cloud.points) projected.push_back(project(pose, intr, X));
  splat_points(projected, s.mask);
  if (s.mask.count() < 2) {
    throw Error(ErrorCode::InvalidArgument, "make_scene: model is not visible");
  }

  for (const Point3& K : keys.points3) {
    s.keypoints3.push_back(K);
    s.keypoints2.push_back(project(pose, intr, K));
    VectorField f;
    s.degenerate_pixels.push_back(fill_unit_field(s.mask, s.keypoints2.back(), f));
    s.gt_fields.push_back(std::move(f));
  }
  return s;
}

std::vector<std::size_t> grow_occlusion(Mask& mask, double frac, Rng& rng) {
  const std::size_t total = mask.count();
  const auto target = static_cast<std::size_t>(std::llround(frac * static_cast<double>(total)));
  std::vector<std::size_t> removed;
  std::vector<std::uint8_t> queued(mask.size(), 0);
  while (removed.size() < target) {
    // Seed from the pixels still present, in row-major order.
    const std::vector<std::size_t> remaining = mask.indices();
    std::deque<std::size_t> frontier{remaining[rng.index(remaining.size())]};
    queued[frontier.front()] = 1;
    while (!frontier.empty() && removed.size() < target) {
      const std::size_t i = frontier.front();
      frontier.pop_front();
      mask[i] = 0;
      removed.push_back(i);
      const int r = mask.row_of(i);
      const int c = mask.col_of(i);
      const int nbr[4][2] = {{r - 1, c}, {r, c - 1}, {r, c + 1}, {r + 1, c}};
      for (const auto& [nr, nc] : nbr) {
        if (nr < 0 || nc < 0 || nr >= mask.height() || nc >= mask.width()) continue;
        const std::size_t j = mask.index(nr, nc);
        if (mask.contains(j) && !queued[j]) {
          queued[j] = 1;
          frontier.push_back(j);
        }
      }
    }
  }
  return removed;
}

SceneSample corrupt(const SceneSample& sample, const NoiseSpec& spec) {
  if (!spec.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "corrupt: invalid noise specification");
  }
  SceneSample out = sample;
  Rng rng(spec.rng_seed);
  if (spec.occlusion_frac > 0.0) {
    for (std::size_t i : grow_occlusion(out.mask, spec.occlusion_frac, rng)) {
      for (VectorField& f : out.gt_fields) f[i] = {};
    }
  }
  const double sigma = spec.angular_sigma_deg * std::numbers::pi / 180.0;
  for (VectorField& f : out.gt_fields) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!out.mask.contains(i)) continue;
      const double theta = sigma * rng.normal();
      const bool flip = rng.uniform() < spec.flip_prob;
      const Direction2 v = f[i];
      if (theta != 0.0) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        f[i] = {c * v.vx - s * v.vy, s * v.vx + c * v.vy};
      }
      if (flip) f[i] = -f[i];
    }
  }
  return out;
}

}  // namespace proxyvote
