// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "proxyvote/field.hpp"
#include "proxyvote/losses.hpp"
#include "proxyvote/metrics.hpp"
#include "proxyvote/model.hpp"
#include "proxyvote/synth.hpp"
#include "proxyvote/voting.hpp"

namespace proxyvote {

/// Which field terms drive the optimizer.
enum class TrainMode { VfOnly, VfPlusDpvl, DpvlOnly };

std::string_view to_string(TrainMode mode);
std::optional<TrainMode> parse_train_mode(std::string_view name);

/// A voted keypoint farther than this from the truth counts as a failure.
inline constexpr double kVoteTolerancePx = 2.0;

struct TrainConfig {
  int iterations = 2000;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  WeightSchedule schedule;
  /// Iterations per schedule epoch.
  int iters_per_epoch = 100;
  /// Step decay: lr * factor^(epoch / every), floored.
  bool lr_decay = true;
  double lr_decay_factor = 0.85;
  int lr_decay_every_epochs = 5;
  double lr_floor = 1e-5;
  TrainMode mode = TrainMode::VfPlusDpvl;
  std::uint64_t rng_seed = 0;
  /// Voting used to score the final fields; its seed is derived per keypoint.
  VotingConfig voting;

  bool is_valid() const {
    return iterations >= 1 && learning_rate > 0.0 && iters_per_epoch >= 1 &&
           adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 &&
           adam_beta2 < 1.0 && adam_eps > 0.0 && schedule.is_valid();
  }
};

/// One optimizer step. Loss values are per masked pixel, summed over
/// keypoints, evaluated at the parameters the step started from.
struct TraceRecord {
  int iter = 0;
  double l_vf = 0.0;
  double l_pv = 0.0;
  double mean_proxy_dist = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  /// Evaluated on the returned fields.
  double final_l_vf = 0.0;
  double final_l_pv = 0.0;
  double final_mean_proxy_dist = 0.0;
  /// See sign_agreement(); 1.0 for a field that points at every keypoint.
  double final_sign_agreement = 0.0;
  /// Per keypoint: voted location, votes and distance to the truth
  /// (infinity when voting failed outright).
  std::vector<Point2> voted;
  std::vector<std::size_t> votes;
  std::vector<double> keypoint_errors;
  bool diverged = false;
  std::string failure;

  double max_keypoint_error() const;
  bool voting_succeeded(double tol = kVoteTolerancePx) const;
};

struct FitResult {
  std::vector<VectorField> fields;
  TrainTrace trace;
};

/// Initial fields standing in for an untrained network output: independent
/// N(0, scale^2) components at every masked pixel, zero elsewhere.
std::vector<VectorField> random_init(const SceneSample& sample, std::uint64_t seed,
                                     double scale = 0.1);

/// Adam on per-pixel field parameters. Gradient per keypoint field:
///   vf_only:      grad L_vf
///   vf_plus_dpvl: grad L_vf + beta * grad L_pv
///   dpvl_only:    beta * grad L_pv
/// with losses divided by the mask size and beta from the epoch schedule.
/// A non-finite loss stops the run with `trace.diverged` set.
FitResult fit_field(const SceneSample& sample, std::span<const VectorField> init,
                    const TrainConfig& cfg);

/// Votes every keypoint of `fields` and fills the voting part of `trace`.
void score_voting(const SceneSample& sample, std::span<const VectorField> fields,
                  const VotingConfig& voting, TrainTrace& trace);

struct ExperimentScene {
  std::string name;
  SceneSample sample;
};

struct ExperimentConfig {
  TrainConfig base;
  std::vector<TrainMode> modes;
  std::vector<std::uint64_t> seeds;
  double init_scale = 0.1;
  /// Enables ADD / 2D projection scoring of the EPnP pose from voted keypoints.
  std::optional<ModelCloud> model;
  unsigned threads = 1;
};

struct RunRecord {
  std::string scene;
  TrainMode mode = TrainMode::VfOnly;
  std::uint64_t seed = 0;
  Mask mask;
  FitResult fit;
  std::optional<Pose> pose;
  std::optional<EvalRecord> eval;
};

struct ExperimentReport {
  std::vector<RunRecord> runs;
  double diameter = 0.0;
};

/// Runs every (scene, seed, mode) combination. Runs sharing a scene and seed
/// start from the same initial fields, so modes are paired.
ExperimentReport run_experiment(std::span<const ExperimentScene> scenes,
                                const ExperimentConfig& cfg);

/// Layout under `dir`:
///   summary.csv                          one row per run
///   <mode>/<scene>/seed_<s>/trace.csv    iter,l_vf,l_pv,mean_proxy_dist,alpha,beta
///   <mode>/<scene>/seed_<s>/summary.json
///   <mode>/<scene>/seed_<s>/fields/      trained fields (estimate layout)
void write_experiment(const ExperimentReport& report, const std::string& dir);

std::string trace_to_csv(const TrainTrace& trace);
std::vector<TraceRecord> trace_from_csv(const std::string& text,
                                        const std::string& source);

}  // namespace proxyvote
