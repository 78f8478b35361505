// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations for the test suite. Nothing here
// includes library headers; inputs are plain arrays so the two code paths
// stay independent.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oracle {

struct OracleResult {
  std::vector<double> reference;
  double tolerance = 0.0;
  bool pass = false;
  double discrepancy = 0.0;
  std::string describe() const;
};

/// |value - reference| <= tol.
OracleResult compare_abs(double reference, double value, double tol);
/// |value - reference| <= tol * max(1, |reference|).
OracleResult compare_rel(double reference, double value, double tol);

/// min over t of |k - (p + t v)|, scanned on a uniform t grid of grid_n
/// points, then rescanned on two finer grids around the best sample.
double line_distance(std::array<double, 2> p, std::array<double, 2> v, std::array<double, 2> k,
                     std::size_t grid_n = 100000);

/// Point on the line p + t v reached by the same scan.
std::array<double, 2> line_closest_point(std::array<double, 2> p, std::array<double, 2> v,
                                         std::array<double, 2> k,
                                         std::size_t grid_n = 100000);

/// Central differences of f at x for every index with active[i] set;
/// inactive entries are 0.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, const std::vector<bool>& active,
                                double step);

struct AllPairsStats {
  std::size_t masked = 0;
  /// Intersections of every unordered pair of non-parallel pixel lines.
  std::vector<std::array<double, 2>> hypotheses;
  double median_distance = 0.0;
  /// Inlier counts per hypothesis; filled only when counted.
  std::vector<std::size_t> inliers;
  std::size_t best_inliers = 0;
  std::array<double, 2> best{0.0, 0.0};
  /// Inlier count at the 90th percentile of `inliers`.
  std::size_t top_decile_inliers = 0;
};

/// field holds (vx, vy) per pixel, row-major; mask holds 0/1 per pixel.
/// Pixel centers are at (col + 0.5, row + 0.5). Throws std::length_error
/// above 2000 masked pixels. Inlier counting (cosine >= cos_threshold,
/// pixel at least 0.5 px from the hypothesis) is O(M^3) and optional.
AllPairsStats all_pairs_vote(int width, int height, const std::vector<double>& field,
                             const std::vector<std::uint8_t>& mask,
                             std::array<double, 2> k_true, bool count_inliers,
                             double cos_threshold = 0.99);

/// Inlier count of one point by direct per-pixel check.
std::size_t direct_inlier_count(int width, int height, const std::vector<double>& field,
                                const std::vector<std::uint8_t>& mask,
                                std::array<double, 2> h, double cos_threshold);

/// Checks the greedy max-min property of a farthest point selection:
/// every selected point after the first is at the largest min-distance to
/// the earlier selections among all points (ties allowed within tol).
/// reference[i] is the recomputed min-distance of selection i.
OracleResult verify_fps(const std::vector<std::array<double, 3>>& cloud,
                        const std::vector<std::size_t>& selection, double tol = 1e-12);

/// Pinhole projection of object point X under rotation R (row-major) and t.
std::array<double, 2> project(const std::array<double, 9>& R, const std::array<double, 3>& t,
                              double fx, double fy, double cx, double cy,
                              const std::array<double, 3>& X);

/// Mean distance between corresponding transformed points.
double add(const std::array<double, 9>& R1, const std::array<double, 3>& t1,
           const std::array<double, 9>& R2, const std::array<double, 3>& t2,
           const std::vector<std::array<double, 3>>& points);

/// Mean over points of the closest transformed point (exhaustive).
double add_s(const std::array<double, 9>& R1, const std::array<double, 3>& t1,
             const std::array<double, 9>& R2, const std::array<double, 3>& t2,
             const std::vector<std::array<double, 3>>& points);

/// Exact diameter by checking every pair.
double diameter(const std::vector<std::array<double, 3>>& points);

}  // namespace oracle
