// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/pipeline.hpp"

#include <limits>

#include "proxyvote/error.hpp"
#include "proxyvote/pnp.hpp"
#include "proxyvote/random.hpp"

namespace proxyvote {

std::vector<KeypointVote> vote_all(const Mask& mask, std::span<const VectorField> fields,
                                   const VotingConfig& cfg) {
  std::vector<KeypointVote> out;
  out.reserve(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    VotingConfig kc = cfg;
    kc.rng_seed = derive_seed(cfg.rng_seed, "voting", k);
    KeypointVote kv;
    try {
      const VoteResult r = vote_keypoint(fields[k], mask, kc);
      kv.location = r.location;
      kv.votes = r.votes;
      kv.refined = r.refined;
      kv.ok = true;
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      kv.location = {nan, nan};
      kv.failure = e.what();
    }
    out.push_back(std::move(kv));
  }
  return out;
}

PoseEstimate estimate_pose(const Mask& mask, std::span<const VectorField> fields,
                           std::span<const Point3> keypoints3, const Intrinsics& intr,
                           const VotingConfig& cfg) {
  if (keypoints3.size() != fields.size()) {
    throw Error(ErrorCode::DimensionMismatch, "estimate_pose: keypoint/field count mismatch");
  }
  PoseEstimate est;
  est.votes = vote_all(mask, fields, cfg);
  std::vector<Correspondence> corrs;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (est.votes[k].ok) corrs.push_back({keypoints3[k], est.votes[k].location});
  }
  try {
    est.pose = solve_epnp(corrs, intr);
  } catch (const Error& e) {
    est.failure = e.what();
  }
  return est;
}

double sign_agreement(const Mask& mask, std::span<const VectorField> fields,
                      std::span<const Point2> keypoints2) {
  if (keypoints2.size() != fields.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sign_agreement: keypoint/field count mismatch");
  }
  std::size_t agree = 0, total = 0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    for (std::size_t i : mask.indices()) {
      const Point2 p = mask.center(i);
      const double dx = keypoints2[k].x - p.x;
      const double dy = keypoints2[k].y - p.y;
      if (dx * dx + dy * dy < kEpsNorm * kEpsNorm) continue;
      ++total;
      if (fields[k][i].vx * dx + fields[k][i].vy * dy > 0.0) ++agree;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace proxyvote
