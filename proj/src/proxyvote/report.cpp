// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include "proxyvote/error.hpp"
#include "proxyvote/io.hpp"

namespace proxyvote {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> sorted_subdirs(const fs::path& p) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::optional<int> first_iteration_at_or_below(const std::vector<TraceRecord>& records,
                                               double target, bool use_lpv) {
  for (const TraceRecord& r : records) {
    if ((use_lpv ? r.l_pv : r.mean_proxy_dist) <= target) return r.iter;
  }
  return std::nullopt;
}

std::vector<TraceSet> collect_traces(const std::string& train_dir) {
  if (!fs::is_directory(train_dir)) {
    throw Error(ErrorCode::Io, "not a directory: " + train_dir);
  }
  // Modes in declaration order so vf_only, when present, is the baseline.
  std::vector<std::pair<TrainMode, fs::path>> modes;
  for (const fs::path& mode_dir : sorted_subdirs(train_dir)) {
    if (auto m = parse_train_mode(mode_dir.filename().string())) modes.emplace_back(*m, mode_dir);
  }
  std::sort(modes.begin(), modes.end());
  std::vector<TraceSet> out;
  for (const auto& [mode, mode_dir] : modes) {
    for (const fs::path& scene_dir : sorted_subdirs(mode_dir)) {
      for (const fs::path& seed_dir : sorted_subdirs(scene_dir)) {
        const fs::path trace = seed_dir / "trace.csv";
        if (!fs::exists(trace)) continue;
        out.push_back({mode_dir.filename().string(),
                       scene_dir.filename().string() + "/" + seed_dir.filename().string(),
                       trace_from_csv(read_file(trace.string()), trace.string())});
      }
    }
  }
  if (out.empty()) throw Error(ErrorCode::Io, train_dir + ": no trace.csv files found");
  return out;
}

AblationReport build_report(const std::vector<TraceSet>& traces,
                            std::optional<double> lpv_threshold) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "report: no traces");
  const std::size_t len = traces.front().records.size();
  for (const TraceSet& t : traces) {
    if (t.records.size() != len || len == 0) {
      std::ostringstream msg;
      msg << "report alignment error: " << t.label << "/" << t.run << " has "
          << t.records.size() << " records, expected " << len;
      throw Error(ErrorCode::DimensionMismatch, msg.str());
    }
  }

  std::vector<std::string> labels;
  std::map<std::string, std::vector<const TraceSet*>> by_label;
  for (const TraceSet& t : traces) {
    if (!by_label.count(t.label)) labels.push_back(t.label);
    by_label[t.label].push_back(&t);
  }

  AblationReport rep;
  const std::string& baseline = labels.front();
  std::map<std::string, double> baseline_final_mpd;
  std::vector<double> baseline_lpv;
  for (const TraceSet* t : by_label[baseline]) {
    baseline_final_mpd[t->run] = t->records.back().mean_proxy_dist;
    baseline_lpv.push_back(t->records.back().l_pv);
  }
  rep.lpv_threshold = lpv_threshold.value_or(median(baseline_lpv));

  for (const std::string& label : labels) {
    ModeSummary ms;
    ms.label = label;
    std::vector<double> lpv, mpd, to_thr, to_base;
    for (const TraceSet* t : by_label[label]) {
      ++ms.runs;
      lpv.push_back(t->records.back().l_pv);
      mpd.push_back(t->records.back().mean_proxy_dist);
      if (auto it = first_iteration_at_or_below(t->records, rep.lpv_threshold, true)) {
        to_thr.push_back(*it);
      }
      if (auto b = baseline_final_mpd.find(t->run); b != baseline_final_mpd.end()) {
        if (auto it = first_iteration_at_or_below(t->records, b->second, false)) {
          to_base.push_back(*it);
        }
      }
    }
    ms.median_final_l_pv = median(lpv);
    ms.median_final_mean_proxy_dist = median(mpd);
    ms.reached_threshold = to_thr.size();
    // Runs that never reach the target count as +infinity for the median.
    auto median_with_misses = [&](std::vector<double> hits) -> std::optional<double> {
      hits.resize(ms.runs, std::numeric_limits<double>::infinity());
      const double m = median(hits);
      return std::isfinite(m) ? std::optional<double>(m) : std::nullopt;
    };
    ms.median_iters_to_threshold = median_with_misses(to_thr);
    ms.median_iters_to_baseline = median_with_misses(to_base);
    rep.modes.push_back(ms);
  }

  std::string csv = "iter";
  for (const TraceSet& t : traces) {
    csv += "," + t.label + "/" + t.run + ":l_pv," + t.label + "/" + t.run + ":mean_proxy_dist";
  }
  csv += "\n";
  for (std::size_t i = 0; i < len; ++i) {
    csv += std::to_string(traces.front().records[i].iter);
    for (const TraceSet& t : traces) {
      csv += "," + format_double(t.records[i].l_pv) + "," +
             format_double(t.records[i].mean_proxy_dist);
    }
    csv += "\n";
  }
  rep.merged_csv = std::move(csv);

  std::ostringstream tab;
  tab << "l_pv threshold: " << format_double(rep.lpv_threshold) << "\n";
  tab << "mode             runs  final_l_pv    final_mpd     iters_to_thr  "
         "iters_to_" << baseline << "_final_mpd\n";
  for (const ModeSummary& ms : rep.modes) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %4zu  %-12s  %-12s  %-12s  %s\n",
                  ms.label.c_str(), ms.runs, fixed(ms.median_final_l_pv, 6).c_str(),
                  fixed(ms.median_final_mean_proxy_dist, 6).c_str(),
                  ms.median_iters_to_threshold
                      ? fixed(*ms.median_iters_to_threshold, 1).c_str()
                      : "never",
                  ms.median_iters_to_baseline ? fixed(*ms.median_iters_to_baseline, 1).c_str()
                                              : "never");
    tab << line;
  }
  rep.table = tab.str();
  return rep;
}

}  // namespace proxyvote
