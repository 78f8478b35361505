// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "proxyvote/error.hpp"
#include "proxyvote/io.hpp"
#include "proxyvote/model.hpp"
#include "support/test_support.hpp"

using namespace proxyvote;

namespace {

SceneSample box_scene(std::uint64_t seed) {
  const ModelCloud box = make_box_cloud(0.1, 0.08, 0.06, 12);
  const Intrinsics intr = default_intrinsics(48, 40);
  const Pose pose = sample_pose(seed, PoseRanges{}, box, intr, 48, 40);
  return make_scene(box, farthest_point_sampling(box, 5), pose, intr, 48, 40);
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  pvtest::Gen g(81);
  for (int i = 0; i < 1000; ++i) {
    const double v = g.normal() * std::pow(10.0, g.integer(-12, 12));
    ASSERT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Pgm, RoundTrip) {
  const Mask m = pvtest::disc_mask(13, 7, 6, 3, 3);
  EXPECT_EQ(mask_from_pgm(mask_to_pgm(m), "m.pgm"), m);
}

TEST(Pgm, BadHeaderNamesSource) {
  try {
    mask_from_pgm("P5\n2 2\n1\n", "x.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("x.pgm"), std::string::npos);
  }
}

TEST(FieldCsv, RoundTripExact) {
  const Mask m = pvtest::disc_mask(20, 20, 10, 10, 6);
  const VectorField f = pvtest::exact_field(m, {3.3, 17.1});
  EXPECT_EQ(field_from_csv(field_to_csv(f, m), 20, 20, "f.csv"), f);
}

TEST(FieldCsv, NanRejectedWithFileAndLine) {
  const std::string text = "row,col,vx,vy\n0,0,1,0\n0,1,nan,0\n";
  try {
    field_from_csv(text, 4, 4, "/tmp/field_2.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    EXPECT_NE(std::string(e.what()).find("/tmp/field_2.csv:3"), std::string::npos) << e.what();
  }
}

TEST(FieldCsv, OutOfImageRejected) {
  EXPECT_THROW(field_from_csv("row,col,vx,vy\n9,0,1,0\n", 4, 4, "f.csv"), Error);
}

TEST(Scene, WriteReadRoundTrip) {
  const SceneSample s = box_scene(3);
  const auto dir = pvtest::temp_dir("io_scene");
  write_scene(s, dir.string());
  const SceneSample r = read_scene(dir.string());
  EXPECT_EQ(r.width, s.width);
  EXPECT_EQ(r.height, s.height);
  EXPECT_EQ(r.pose.rotation, s.pose.rotation);
  EXPECT_EQ(r.pose.translation, s.pose.translation);
  EXPECT_EQ(r.intr.fx, s.intr.fx);
  EXPECT_EQ(r.mask, s.mask);
  ASSERT_EQ(r.keypoints2.size(), s.keypoints2.size());
  for (std::size_t k = 0; k < s.keypoints2.size(); ++k) {
    EXPECT_EQ(r.keypoints2[k], s.keypoints2[k]);
    EXPECT_EQ(r.keypoints3[k], s.keypoints3[k]);
    EXPECT_EQ(r.gt_fields[k], s.gt_fields[k]);
  }
}

TEST(Scene, MissingDirectoryIsIo) {
  try {
    read_scene("/nonexistent/scene");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(FieldSet, RoundTripAndCorruptFileNamed) {
  const SceneSample s = box_scene(4);
  const auto dir = pvtest::temp_dir("io_fields");
  write_field_set({s.mask, s.gt_fields}, dir.string());
  const FieldSet back = read_field_set(dir.string());
  EXPECT_EQ(back.mask, s.mask);
  ASSERT_EQ(back.fields.size(), s.gt_fields.size());
  for (std::size_t k = 0; k < s.gt_fields.size(); ++k) EXPECT_EQ(back.fields[k], s.gt_fields[k]);

  const auto bad = dir / "field_1.csv";
  std::ofstream(bad, std::ios::app) << "0,0,inf,1\n";
  try {
    read_field_set(dir.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos) << e.what();
  }
}

TEST(WriteFileAtomic, ReplacesContent) {
  const auto dir = pvtest::temp_dir("io_atomic");
  const std::string p = (dir / "a.txt").string();
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  EXPECT_EQ(read_file(p), "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
}
