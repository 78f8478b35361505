// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxyvote/trainer.hpp"

namespace proxyvote {

/// One training curve: `label` is the mode, `run` pairs curves across modes.
struct TraceSet {
  std::string label;
  std::string run;
  std::vector<TraceRecord> records;
};

struct ModeSummary {
  std::string label;
  std::size_t runs = 0;
  double median_final_l_pv = 0.0;
  double median_final_mean_proxy_dist = 0.0;
  /// Median first iteration with l_pv <= threshold; empty when fewer than
  /// half of the runs get there.
  std::optional<double> median_iters_to_threshold;
  std::size_t reached_threshold = 0;
  /// Median first iteration at which mean_proxy_dist reaches the first
  /// label's final value on the paired run.
  std::optional<double> median_iters_to_baseline;
};

struct AblationReport {
  double lpv_threshold = 0.0;
  std::vector<ModeSummary> modes;
  /// iter followed by `<label>/<run>:l_pv` and `<label>/<run>:mean_proxy_dist`.
  std::string merged_csv;
  std::string table;
};

/// Collects `<dir>/<mode>/<scene>/seed_<s>/trace.csv` written by
/// write_experiment, ordered by mode then run.
std::vector<TraceSet> collect_traces(const std::string& train_dir);

/// All traces must have the same length (DimensionMismatch otherwise).
/// Without an explicit threshold the median final l_pv of the first label is
/// used.
AblationReport build_report(const std::vector<TraceSet>& traces,
                            std::optional<double> lpv_threshold);

/// First record index with value(record) <= target, or empty.
std::optional<int> first_iteration_at_or_below(const std::vector<TraceRecord>& records,
                                               double target, bool use_lpv);

double median(std::vector<double> values);

}  // namespace proxyvote
