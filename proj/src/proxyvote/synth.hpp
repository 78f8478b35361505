// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "proxyvote/field.hpp"
#include "proxyvote/geometry.hpp"
#include "proxyvote/model.hpp"
#include "proxyvote/random.hpp"

namespace proxyvote {

/// Radius of the disc splatted around every projected model point.
inline constexpr double kSplatRadiusPx = 1.5;
/// Pixels closer than this to a keypoint get a zero (degenerate) direction.
inline constexpr double kCoincidentPx = 1e-9;
inline constexpr int kMaxPoseTries = 1000;

/// Translation box for random poses, plus the image margin every projected
/// model point must respect.
struct PoseRanges {
  double x_min = -0.02, x_max = 0.02;
  double y_min = -0.02, y_max = 0.02;
  double z_min = 0.5, z_max = 0.8;
  double margin_px = 3.0;
};

/// Synthetic ground truth for one object instance.
struct SceneSample {
  int width = 0;
  int height = 0;
  Pose pose;
  Intrinsics intr;
  Mask mask;
  std::vector<Point2> keypoints2;
  std::vector<Point3> keypoints3;
  /// One unit-direction field per keypoint, zero outside the mask.
  std::vector<VectorField> gt_fields;
  /// Per field, number of masked pixels that coincide with the keypoint.
  std::vector<std::size_t> degenerate_pixels;
};

/// Corruption applied to a clean sample: Gaussian rotation of each direction,
/// random sign flips, and removal of a connected blob of the mask.
struct NoiseSpec {
  double angular_sigma_deg = 0.0;
  double flip_prob = 0.0;
  double occlusion_frac = 0.0;
  std::uint64_t rng_seed = 0;

  bool is_valid() const {
    return angular_sigma_deg >= 0.0 && flip_prob >= 0.0 && flip_prob <= 1.0 &&
           occlusion_frac >= 0.0 && occlusion_frac <= 1.0;
  }
};

/// Focal length 2.5 x width, principal point at the image center.
Intrinsics default_intrinsics(int width, int height);

/// Uniformly distributed rotation (Shoemake's method).
Eigen::Quaterniond random_rotation(Rng& rng);

/// Random pose whose projected model lies inside the image margin. Throws
/// Config after kMaxPoseTries rejected draws.
Pose sample_pose(std::uint64_t seed, const PoseRanges& ranges,
                 const ModelCloud& cloud, const Intrinsics& intr, int width,
                 int height);

SceneSample make_scene(const ModelCloud& cloud, const KeypointSet& keys,
                       const Pose& pose, const Intrinsics& intr, int width,
                       int height);

/// Fills `mask` with discs of kSplatRadiusPx around each point.
void splat_points(std::span<const Point2> points, Mask& mask);

/// Ground-truth direction field toward `keypoint` over `mask`. Returns the
/// number of coincident pixels left at zero.
std::size_t fill_unit_field(const Mask& mask, Point2 keypoint, VectorField& field);

SceneSample corrupt(const SceneSample& sample, const NoiseSpec& spec);

/// Removes a 4-connected region of round(frac * |mask|) pixels grown from
/// random seeds. Returns the removed indices in growth order.
std::vector<std::size_t> grow_occlusion(Mask& mask, double frac, Rng& rng);

}  // namespace proxyvote
