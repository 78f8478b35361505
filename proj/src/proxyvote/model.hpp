// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proxyvote/geometry.hpp"

namespace proxyvote {

/// Point cloud of a 3D model, in model units.
struct ModelCloud {
  std::vector<Point3> points;
  std::string name;
  bool symmetric = false;
};

/// Keypoints in the model frame, in selection order.
struct KeypointSet {
  std::vector<Point3> points3;
  /// Index of each keypoint in the source cloud.
  std::vector<std::size_t> source_indices;
  /// Distance from each keypoint to the previously selected ones at the time
  /// it was chosen (infinity for the first).
  std::vector<double> min_distances;

  std::size_t count() const { return points3.size(); }
};

inline constexpr std::size_t kMinModelPoints = 4;
inline constexpr std::size_t kDiameterExactLimit = 5000;
inline constexpr std::size_t kDefaultKeypointCount = 8;

/// Loads vertices from an ASCII PLY or an OBJ file; faces and other records
/// are ignored. Throws Io, Parse (message carries the line number), or
/// TooFewPoints.
ModelCloud load_model(const std::string& path);

/// Index of the point farthest from the centroid (lowest index on ties).
std::size_t farthest_from_centroid(const ModelCloud& cloud);

/// Greedy max-min farthest point sampling; ties go to the lowest index.
/// `start` defaults to farthest_from_centroid.
KeypointSet farthest_point_sampling(const ModelCloud& cloud, std::size_t n,
                                    std::optional<std::size_t> start = {});

/// Maximum pairwise distance. Clouds above kDiameterExactLimit points are
/// subsampled to that size with a fixed seed first.
double model_diameter(const ModelCloud& cloud);

/// Points on the surface of an axis-aligned box centered at the origin, on a
/// regular lattice with `per_edge` samples along each edge.
ModelCloud make_box_cloud(double sx, double sy, double sz, int per_edge,
                          std::string name = "box");

}  // namespace proxyvote
