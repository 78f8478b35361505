// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "proxyvote/error.hpp"
#include "proxyvote/report.hpp"

using namespace proxyvote;

namespace {

/// Geometric decay l_pv = mpd = start * rate^iter.
TraceSet decay(const std::string& label, const std::string& run, double start, double rate,
               int n) {
  TraceSet t{label, run, {}};
  for (int i = 0; i < n; ++i) {
    const double v = start * std::pow(rate, i);
    t.records.push_back({i, v, v, v, 1.0, 1e-3});
  }
  return t;
}

}  // namespace

TEST(Median, OddEvenEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median({}), 0.0);
}

TEST(FirstIteration, FindsCrossing) {
  const TraceSet t = decay("m", "r", 1.0, 0.5, 10);
  EXPECT_EQ(first_iteration_at_or_below(t.records, 0.25, true), 2);
  EXPECT_EQ(first_iteration_at_or_below(t.records, 1.0, false), 0);
  EXPECT_FALSE(first_iteration_at_or_below(t.records, 1e-9, true).has_value());
}

TEST(BuildReport, UnequalLengthsRejected) {
  const std::vector<TraceSet> traces{decay("vf_only", "s0", 1, 0.9, 10),
                                     decay("vf_plus_dpvl", "s0", 1, 0.8, 9)};
  try {
    build_report(traces, std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    EXPECT_NE(std::string(e.what()).find("vf_plus_dpvl/s0"), std::string::npos);
  }
}

TEST(BuildReport, SingleModeIsValid) {
  const AblationReport rep = build_report({decay("vf_only", "s0", 1, 0.9, 20)}, std::nullopt);
  ASSERT_EQ(rep.modes.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.lpv_threshold, std::pow(0.9, 19));
  EXPECT_EQ(rep.modes[0].median_iters_to_threshold, 19.0);
  EXPECT_EQ(rep.modes[0].median_iters_to_baseline, 19.0);
}

TEST(BuildReport, ExplicitThresholdHonored) {
  const std::vector<TraceSet> traces{decay("vf_only", "s0", 1, 0.5, 10),
                                     decay("vf_plus_dpvl", "s0", 1, 0.25, 10)};
  const AblationReport rep = build_report(traces, 0.1);
  EXPECT_EQ(rep.lpv_threshold, 0.1);
  EXPECT_EQ(rep.modes[0].median_iters_to_threshold, 4.0);  // 0.5^4 = 0.0625
  EXPECT_EQ(rep.modes[1].median_iters_to_threshold, 2.0);  // 0.25^2 = 0.0625
  EXPECT_NE(rep.table.find("l_pv threshold: 0.1"), std::string::npos);
}

TEST(BuildReport, TwoModesFiveSeeds) {
  std::vector<TraceSet> traces;
  for (int s = 0; s < 5; ++s) traces.push_back(decay("vf_only", "s" + std::to_string(s), 1, 0.9, 50));
  for (int s = 0; s < 5; ++s) {
    traces.push_back(decay("vf_plus_dpvl", "s" + std::to_string(s), 1, 0.8, 50));
  }
  const AblationReport rep = build_report(traces, std::nullopt);
  ASSERT_EQ(rep.modes.size(), 2u);
  EXPECT_EQ(rep.modes[0].runs, 5u);
  EXPECT_EQ(rep.modes[1].runs, 5u);
  // Baseline final 0.9^49; 0.8^i first drops below it at i = ceil(49 ln 0.9 / ln 0.8).
  const double expect = std::ceil(49 * std::log(0.9) / std::log(0.8));
  EXPECT_EQ(*rep.modes[1].median_iters_to_baseline, expect);
  EXPECT_LT(rep.modes[1].median_final_mean_proxy_dist, rep.modes[0].median_final_mean_proxy_dist);

  // Merged CSV: header plus one line per iteration, 1 + 2 * 10 columns.
  std::size_t lines = 0, pos = 0;
  while ((pos = rep.merged_csv.find('\n', pos)) != std::string::npos) ++lines, ++pos;
  EXPECT_EQ(lines, 51u);
  const std::string header = rep.merged_csv.substr(0, rep.merged_csv.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 20);
  // Table: threshold line, header line, one row per mode.
  EXPECT_EQ(std::count(rep.table.begin(), rep.table.end(), '\n'), 4);
}

TEST(BuildReport, MissedRunsCountAsNever) {
  std::vector<TraceSet> traces;
  for (int s = 0; s < 3; ++s) traces.push_back(decay("vf_only", "s" + std::to_string(s), 1, 0.5, 10));
  for (int s = 0; s < 3; ++s) traces.push_back(decay("dpvl_only", "s" + std::to_string(s), 1, 1.0, 10));
  const AblationReport rep = build_report(traces, std::nullopt);
  EXPECT_FALSE(rep.modes[1].median_iters_to_threshold.has_value());
  EXPECT_NE(rep.table.find("never"), std::string::npos);
}
