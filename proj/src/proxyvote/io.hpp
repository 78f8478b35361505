// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "proxyvote/field.hpp"
#include "proxyvote/synth.hpp"

namespace proxyvote {

/// Estimated fields for every keypoint of one scene plus the mask they cover.
struct FieldSet {
  Mask mask;
  std::vector<VectorField> fields;
};

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::string mask_to_pgm(const Mask& mask);
Mask mask_from_pgm(const std::string& text, const std::string& source);

/// CSV of masked pixels: `row,col,vx,vy`.
std::string field_to_csv(const VectorField& field, const Mask& mask);
VectorField field_from_csv(const std::string& text, int width, int height,
                           const std::string& source);

/// Scene directory layout:
///   pose.json       rotation (9, row-major), translation (3), fx, fy, cx, cy,
///                   width, height, keypoint count
///   mask.pgm        ASCII P2, 1 = object
///   keypoints.csv   index,u,v,x,y,z
///   field_<i>.csv   ground-truth direction field of keypoint i
void write_scene(const SceneSample& sample, const std::string& dir);
SceneSample read_scene(const std::string& dir);

/// Estimate directory layout: mask.pgm and field_<i>.csv as above.
void write_field_set(const FieldSet& set, const std::string& dir);
FieldSet read_field_set(const std::string& dir);

}  // namespace proxyvote
