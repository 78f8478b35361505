// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/proxyvote.h"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "proxyvote/error.hpp"
#include "proxyvote/geometry.hpp"
#include "proxyvote/io.hpp"
#include "proxyvote/metrics.hpp"
#include "proxyvote/model.hpp"
#include "proxyvote/pipeline.hpp"
#include "proxyvote/pnp.hpp"
#include "proxyvote/random.hpp"
#include "proxyvote/report.hpp"
#include "proxyvote/synth.hpp"
#include "proxyvote/trainer.hpp"

#ifndef PROXYVOTE_VERSION_STRING
#define PROXYVOTE_VERSION_STRING "0.0.0-unknown"
#endif

namespace pv = proxyvote;

struct pv_model {
  pv::ModelCloud cloud;
};

struct pv_scene {
  pv::SceneSample sample;
};

struct pv_fields {
  pv::FieldSet set;
};

struct pv_experiment {
  pv::ExperimentConfig cfg;
  std::vector<pv::ExperimentScene> scenes;
  std::optional<pv::ExperimentReport> report;
};

struct pv_report {
  pv::AblationReport report;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(pv::ErrorCode::InvalidArgument) == PV_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(pv::ErrorCode::Divergence) == PV_ERR_DIVERGENCE);

class ApiError {
 public:
  ApiError(pv_status s, std::string m) : status(s), message(std::move(m)) {}
  pv_status status;
  std::string message;
};

template <typename F>
pv_status guarded(const char* where, F&& body) {
  g_last_error.clear();
  try {
    body();
    return PV_OK;
  } catch (const ApiError& e) {
    g_last_error = std::string(where) + ": " + e.message;
    return e.status;
  } catch (const pv::Error& e) {
    g_last_error = e.what();
    return static_cast<pv_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = std::string(where) + ": out of memory";
    return PV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string(where) + ": " + e.what();
    return PV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = std::string(where) + ": unknown failure";
    return PV_ERR_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* name) {
  if (p == nullptr) throw ApiError(PV_ERR_INVALID_ARGUMENT, std::string(name) + " is null");
}

pv::Pose to_pose(const pv_pose& p) {
  pv::Pose out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.rotation(r, c) = p.rotation[3 * r + c];
    out.translation(r) = p.translation[r];
  }
  return out;
}

pv_pose from_pose(const pv::Pose& p) {
  pv_pose out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.rotation[3 * r + c] = p.rotation(r, c);
    out.translation[r] = p.translation(r);
  }
  return out;
}

pv::Intrinsics to_intr(const pv_intrinsics& i) { return {i.fx, i.fy, i.cx, i.cy}; }
pv_intrinsics from_intr(const pv::Intrinsics& i) { return {i.fx, i.fy, i.cx, i.cy}; }

pv::PoseRanges to_ranges(const pv_pose_ranges& r) {
  pv::PoseRanges out;
  out.x_min = r.x_min;
  out.x_max = r.x_max;
  out.y_min = r.y_min;
  out.y_max = r.y_max;
  out.z_min = r.z_min;
  out.z_max = r.z_max;
  out.margin_px = r.margin_px;
  return out;
}

pv::VotingConfig to_voting(const pv_voting_config& c) {
  pv::VotingConfig out;
  out.num_samples = c.num_samples;
  out.inlier_cos_threshold = c.inlier_cos_threshold;
  out.refine = c.refine != 0;
  out.rng_seed = c.rng_seed;
  if (!out.is_valid()) throw ApiError(PV_ERR_CONFIG, "invalid voting config");
  return out;
}

pv::TrainMode to_mode(pv_train_mode m) {
  switch (m) {
    case PV_MODE_VF_ONLY: return pv::TrainMode::VfOnly;
    case PV_MODE_VF_PLUS_DPVL: return pv::TrainMode::VfPlusDpvl;
    case PV_MODE_DPVL_ONLY: return pv::TrainMode::DpvlOnly;
  }
  throw ApiError(PV_ERR_INVALID_ARGUMENT, "unknown train mode");
}

pv_train_mode from_mode(pv::TrainMode m) {
  switch (m) {
    case pv::TrainMode::VfOnly: return PV_MODE_VF_ONLY;
    case pv::TrainMode::VfPlusDpvl: return PV_MODE_VF_PLUS_DPVL;
    case pv::TrainMode::DpvlOnly: return PV_MODE_DPVL_ONLY;
  }
  return PV_MODE_VF_ONLY;
}

std::vector<pv::Correspondence> to_corrs(const pv_point3* object, const pv_point2* image,
                                         size_t n) {
  if (n > 0) {
    require(object, "object");
    require(image, "image");
  }
  std::vector<pv::Correspondence> out(n);
  for (size_t i = 0; i < n; ++i) {
    out[i] = {{object[i].x, object[i].y, object[i].z}, {image[i].x, image[i].y}};
  }
  return out;
}

pv::KeypointSet keypoints_for(const pv::ModelCloud& cloud, size_t n) {
  return pv::farthest_point_sampling(cloud, n);
}

}  // namespace

extern "C" {

const char* pv_version(void) { return PROXYVOTE_VERSION_STRING; }

const char* pv_status_name(pv_status status) {
  switch (status) {
    case PV_OK: return "ok";
    case PV_ERR_OUT_OF_RANGE: return "out of range";
    case PV_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case PV_ERR_INTERNAL: return "internal error";
    default: break;
  }
  if (status >= PV_ERR_INVALID_ARGUMENT && status <= PV_ERR_DIVERGENCE) {
    return pv::to_string(static_cast<pv::ErrorCode>(status));
  }
  return "unknown status";
}

const char* pv_last_error(void) { return g_last_error.c_str(); }

pv_status pv_format_double(double v, char* buf, size_t buf_size) {
  return guarded("pv_format_double", [&] {
    require(buf, "buf");
    const std::string s = pv::format_double(v);
    if (s.size() + 1 > buf_size) throw ApiError(PV_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

uint64_t pv_derive_seed(uint64_t base, const char* stream, uint64_t index) {
  return pv::derive_seed(base, stream ? stream : "", index);
}

pv_status pv_parse_train_mode(const char* name, pv_train_mode* out) {
  return guarded("pv_parse_train_mode", [&] {
    require(name, "name");
    require(out, "out");
    const auto m = pv::parse_train_mode(name);
    if (!m) throw ApiError(PV_ERR_CONFIG, std::string("unknown mode '") + name + "'");
    *out = from_mode(*m);
  });
}

const char* pv_train_mode_name(pv_train_mode mode) {
  switch (mode) {
    case PV_MODE_VF_ONLY: return "vf_only";
    case PV_MODE_VF_PLUS_DPVL: return "vf_plus_dpvl";
    case PV_MODE_DPVL_ONLY: return "dpvl_only";
  }
  return "unknown";
}

void pv_pose_ranges_default(pv_pose_ranges* out) {
  if (!out) return;
  const pv::PoseRanges r;
  *out = {r.x_min, r.x_max, r.y_min, r.y_max, r.z_min, r.z_max, r.margin_px};
}

void pv_voting_config_default(pv_voting_config* out) {
  if (!out) return;
  const pv::VotingConfig c;
  *out = {c.num_samples, c.inlier_cos_threshold, c.refine ? 1 : 0, c.rng_seed};
}

void pv_train_config_default(pv_train_config* out) {
  if (!out) return;
  const pv::TrainConfig t;
  const pv::ExperimentConfig e;
  out->iterations = t.iterations;
  out->learning_rate = t.learning_rate;
  out->iters_per_epoch = t.iters_per_epoch;
  out->lr_decay = t.lr_decay ? 1 : 0;
  out->init_scale = e.init_scale;
  pv_voting_config_default(&out->voting);
}

void pv_default_intrinsics(int width, int height, pv_intrinsics* out) {
  if (!out) return;
  *out = from_intr(pv::default_intrinsics(width, height));
}

pv_status pv_point_line_distance(pv_point2 p, pv_point2 v, pv_point2 k, double* out) {
  return guarded("pv_point_line_distance", [&] {
    require(out, "out");
    *out = pv::point_line_distance({p.x, p.y}, {v.x, v.y}, {k.x, k.y});
  });
}

pv_status pv_project(const pv_pose* pose, const pv_intrinsics* intr, pv_point3 x,
                     pv_point2* out) {
  return guarded("pv_project", [&] {
    require(pose, "pose");
    require(intr, "intr");
    require(out, "out");
    const pv::Point2 p = pv::project(to_pose(*pose), to_intr(*intr), {x.x, x.y, x.z});
    *out = {p.x, p.y};
  });
}

// ---- models ----

pv_status pv_model_load(const char* path, pv_model** out) {
  return guarded("pv_model_load", [&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<pv_model>();
    m->cloud = pv::load_model(path);
    *out = m.release();
  });
}

pv_status pv_model_create(const pv_point3* points, size_t n, pv_model** out) {
  return guarded("pv_model_create", [&] {
    require(out, "out");
    *out = nullptr;
    if (n > 0) require(points, "points");
    if (n < pv::kMinModelPoints) {
      throw pv::Error(pv::ErrorCode::TooFewPoints, "pv_model_create: need at least 4 points");
    }
    auto m = std::make_unique<pv_model>();
    m->cloud.name = "points";
    m->cloud.points.reserve(n);
    for (size_t i = 0; i < n; ++i) m->cloud.points.push_back({points[i].x, points[i].y, points[i].z});
    *out = m.release();
  });
}

pv_status pv_model_create_box(double sx, double sy, double sz, int per_edge, pv_model** out) {
  return guarded("pv_model_create_box", [&] {
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<pv_model>();
    m->cloud = pv::make_box_cloud(sx, sy, sz, per_edge);
    *out = m.release();
  });
}

void pv_model_destroy(pv_model* model) { delete model; }

size_t pv_model_num_points(const pv_model* model) {
  return model ? model->cloud.points.size() : 0;
}

pv_status pv_model_points(const pv_model* model, pv_point3* out, size_t capacity) {
  return guarded("pv_model_points", [&] {
    require(model, "model");
    require(out, "out");
    if (capacity < model->cloud.points.size()) {
      throw ApiError(PV_ERR_BUFFER_TOO_SMALL, "capacity below point count");
    }
    for (size_t i = 0; i < model->cloud.points.size(); ++i) {
      const auto& p = model->cloud.points[i];
      out[i] = {p.x, p.y, p.z};
    }
  });
}

pv_status pv_model_set_symmetric(pv_model* model, int symmetric) {
  return guarded("pv_model_set_symmetric", [&] {
    require(model, "model");
    model->cloud.symmetric = symmetric != 0;
  });
}

int pv_model_symmetric(const pv_model* model) {
  return model && model->cloud.symmetric ? 1 : 0;
}

pv_status pv_model_diameter(const pv_model* model, double* out) {
  return guarded("pv_model_diameter", [&] {
    require(model, "model");
    require(out, "out");
    *out = pv::model_diameter(model->cloud);
  });
}

pv_status pv_model_fps(const pv_model* model, size_t n, pv_point3* out) {
  return guarded("pv_model_fps", [&] {
    require(model, "model");
    require(out, "out");
    const pv::KeypointSet ks = keypoints_for(model->cloud, n);
    for (size_t i = 0; i < ks.count(); ++i) out[i] = {ks.points3[i].x, ks.points3[i].y, ks.points3[i].z};
  });
}

// ---- scenes ----

pv_status pv_scene_generate(const pv_model* model, size_t num_keypoints, int width,
                            int height, uint64_t seed, const pv_pose_ranges* ranges,
                            pv_scene** out) {
  return guarded("pv_scene_generate", [&] {
    require(model, "model");
    require(out, "out");
    *out = nullptr;
    const pv::PoseRanges r = ranges ? to_ranges(*ranges) : pv::PoseRanges{};
    const pv::Intrinsics intr = pv::default_intrinsics(width, height);
    const pv::Pose pose = pv::sample_pose(seed, r, model->cloud, intr, width, height);
    auto s = std::make_unique<pv_scene>();
    s->sample = pv::make_scene(model->cloud, keypoints_for(model->cloud, num_keypoints), pose,
                               intr, width, height);
    *out = s.release();
  });
}

pv_status pv_scene_from_pose(const pv_model* model, size_t num_keypoints, const pv_pose* pose,
                             const pv_intrinsics* intr, int width, int height,
                             pv_scene** out) {
  return guarded("pv_scene_from_pose", [&] {
    require(model, "model");
    require(pose, "pose");
    require(intr, "intr");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<pv_scene>();
    s->sample = pv::make_scene(model->cloud, keypoints_for(model->cloud, num_keypoints),
                               to_pose(*pose), to_intr(*intr), width, height);
    *out = s.release();
  });
}

pv_status pv_scene_read(const char* dir, pv_scene** out) {
  return guarded("pv_scene_read", [&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<pv_scene>();
    s->sample = pv::read_scene(dir);
    *out = s.release();
  });
}

pv_status pv_scene_write(const pv_scene* scene, const char* dir) {
  return guarded("pv_scene_write", [&] {
    require(scene, "scene");
    require(dir, "dir");
    pv::write_scene(scene->sample, dir);
  });
}

void pv_scene_destroy(pv_scene* scene) { delete scene; }

pv_status pv_scene_info_get(const pv_scene* scene, pv_scene_info* out) {
  return guarded("pv_scene_info_get", [&] {
    require(scene, "scene");
    require(out, "out");
    const pv::SceneSample& s = scene->sample;
    out->width = s.width;
    out->height = s.height;
    out->num_keypoints = s.keypoints2.size();
    out->mask_count = s.mask.count();
    out->pose = from_pose(s.pose);
    out->intrinsics = from_intr(s.intr);
  });
}

pv_status pv_scene_keypoint(const pv_scene* scene, size_t k, pv_point2* image,
                            pv_point3* object) {
  return guarded("pv_scene_keypoint", [&] {
    require(scene, "scene");
    if (k >= scene->sample.keypoints2.size()) {
      throw ApiError(PV_ERR_OUT_OF_RANGE, "keypoint index out of range");
    }
    if (image) image[0] = {scene->sample.keypoints2[k].x, scene->sample.keypoints2[k].y};
    if (object) {
      const auto& p = scene->sample.keypoints3[k];
      object[0] = {p.x, p.y, p.z};
    }
  });
}

// ---- field sets ----

pv_status pv_fields_from_scene(const pv_scene* scene, pv_fields** out) {
  return guarded("pv_fields_from_scene", [&] {
    require(scene, "scene");
    require(out, "out");
    *out = nullptr;
    auto f = std::make_unique<pv_fields>();
    f->set = {scene->sample.mask, scene->sample.gt_fields};
    *out = f.release();
  });
}

pv_status pv_fields_corrupt(const pv_scene* scene, const pv_noise_spec* noise,
                            pv_fields** out) {
  return guarded("pv_fields_corrupt", [&] {
    require(scene, "scene");
    require(noise, "noise");
    require(out, "out");
    *out = nullptr;
    pv::NoiseSpec spec;
    spec.angular_sigma_deg = noise->angular_sigma_deg;
    spec.flip_prob = noise->flip_prob;
    spec.occlusion_frac = noise->occlusion_frac;
    spec.rng_seed = noise->rng_seed;
    pv::SceneSample c = pv::corrupt(scene->sample, spec);
    auto f = std::make_unique<pv_fields>();
    f->set = {std::move(c.mask), std::move(c.gt_fields)};
    *out = f.release();
  });
}

pv_status pv_fields_read(const char* dir, pv_fields** out) {
  return guarded("pv_fields_read", [&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    auto f = std::make_unique<pv_fields>();
    f->set = pv::read_field_set(dir);
    *out = f.release();
  });
}

pv_status pv_fields_write(const pv_fields* fields, const char* dir) {
  return guarded("pv_fields_write", [&] {
    require(fields, "fields");
    require(dir, "dir");
    pv::write_field_set(fields->set, dir);
  });
}

void pv_fields_destroy(pv_fields* fields) { delete fields; }

size_t pv_fields_count(const pv_fields* fields) {
  return fields ? fields->set.fields.size() : 0;
}

size_t pv_fields_mask_count(const pv_fields* fields) {
  return fields ? fields->set.mask.count() : 0;
}

pv_status pv_fields_get(const pv_fields* fields, size_t k, pv_point2* out, size_t capacity) {
  return guarded("pv_fields_get", [&] {
    require(fields, "fields");
    require(out, "out");
    if (k >= fields->set.fields.size()) throw ApiError(PV_ERR_OUT_OF_RANGE, "field index out of range");
    const pv::VectorField& f = fields->set.fields[k];
    if (capacity < f.size()) throw ApiError(PV_ERR_BUFFER_TOO_SMALL, "capacity below field size");
    for (size_t i = 0; i < f.size(); ++i) out[i] = {f[i].vx, f[i].vy};
  });
}

pv_status pv_vote_all(const pv_fields* fields, const pv_voting_config* cfg, pv_vote* out) {
  return guarded("pv_vote_all", [&] {
    require(fields, "fields");
    require(cfg, "cfg");
    require(out, "out");
    const auto votes = pv::vote_all(fields->set.mask, fields->set.fields, to_voting(*cfg));
    for (size_t k = 0; k < votes.size(); ++k) {
      out[k] = {{votes[k].location.x, votes[k].location.y}, votes[k].votes,
                votes[k].refined ? 1 : 0, votes[k].ok ? 1 : 0};
    }
  });
}

pv_status pv_estimate_pose(const pv_scene* scene, const pv_fields* fields,
                           const pv_voting_config* cfg, pv_vote* votes, pv_pose* pose,
                           int* has_pose) {
  return guarded("pv_estimate_pose", [&] {
    require(scene, "scene");
    require(fields, "fields");
    require(cfg, "cfg");
    require(pose, "pose");
    require(has_pose, "has_pose");
    const pv::SceneSample& s = scene->sample;
    if (!fields->set.mask.same_shape(s.mask)) {
      throw pv::Error(pv::ErrorCode::DimensionMismatch,
                      "pv_estimate_pose: field size differs from scene size");
    }
    const pv::PoseEstimate est =
        pv::estimate_pose(fields->set.mask, fields->set.fields, s.keypoints3, s.intr,
                          to_voting(*cfg));
    if (votes) {
      for (size_t k = 0; k < est.votes.size(); ++k) {
        const auto& v = est.votes[k];
        votes[k] = {{v.location.x, v.location.y}, v.votes, v.refined ? 1 : 0, v.ok ? 1 : 0};
      }
    }
    *has_pose = est.pose ? 1 : 0;
    if (est.pose) {
      *pose = from_pose(*est.pose);
    } else {
      g_last_error = est.failure;
    }
  });
}

// ---- pose ----

pv_status pv_solve_epnp(const pv_point3* object, const pv_point2* image, size_t n,
                        const pv_intrinsics* intr, pv_pose* out) {
  return guarded("pv_solve_epnp", [&] {
    require(intr, "intr");
    require(out, "out");
    *out = from_pose(pv::solve_epnp(to_corrs(object, image, n), to_intr(*intr)));
  });
}

pv_status pv_refine_pose(const pv_pose* init, const pv_point3* object, const pv_point2* image,
                         size_t n, const pv_intrinsics* intr, int iters, pv_pose* out) {
  return guarded("pv_refine_pose", [&] {
    require(init, "init");
    require(intr, "intr");
    require(out, "out");
    *out = from_pose(
        pv::refine_pose(to_pose(*init), to_corrs(object, image, n), to_intr(*intr), iters));
  });
}

pv_status pv_reprojection_rmse(const pv_pose* pose, const pv_point3* object,
                               const pv_point2* image, size_t n, const pv_intrinsics* intr,
                               double* out) {
  return guarded("pv_reprojection_rmse", [&] {
    require(pose, "pose");
    require(intr, "intr");
    require(out, "out");
    *out = pv::reprojection_rmse(to_pose(*pose), to_corrs(object, image, n), to_intr(*intr));
  });
}

pv_status pv_evaluate_pose(const pv_model* model, const pv_pose* gt, const pv_pose* est,
                           const pv_intrinsics* intr, double diameter, pv_eval_record* out) {
  return guarded("pv_evaluate_pose", [&] {
    require(model, "model");
    require(gt, "gt");
    require(est, "est");
    require(intr, "intr");
    require(out, "out");
    const pv::EvalRecord r = pv::evaluate_pose(to_pose(*gt), to_pose(*est), model->cloud.points,
                                               to_intr(*intr), diameter, model->cloud.symmetric);
    *out = {r.add, r.add_s, r.proj2d, r.add_correct ? 1 : 0, r.proj_correct ? 1 : 0};
  });
}

pv_status pv_judge(double add, double diameter, double proj, int* add_correct,
                   int* proj_correct) {
  return guarded("pv_judge", [&] {
    require(add_correct, "add_correct");
    require(proj_correct, "proj_correct");
    const pv::Judgement j = pv::judge(add, diameter, proj);
    *add_correct = j.add_correct ? 1 : 0;
    *proj_correct = j.proj_correct ? 1 : 0;
  });
}

// ---- experiments ----

pv_status pv_experiment_create(const pv_train_config* cfg, pv_experiment** out) {
  return guarded("pv_experiment_create", [&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = nullptr;
    auto e = std::make_unique<pv_experiment>();
    pv::TrainConfig& t = e->cfg.base;
    t.iterations = cfg->iterations;
    t.learning_rate = cfg->learning_rate;
    t.iters_per_epoch = cfg->iters_per_epoch;
    t.lr_decay = cfg->lr_decay != 0;
    t.voting = to_voting(cfg->voting);
    if (!t.is_valid()) throw ApiError(PV_ERR_CONFIG, "invalid train config");
    if (!(cfg->init_scale > 0.0)) throw ApiError(PV_ERR_CONFIG, "init_scale must be positive");
    e->cfg.init_scale = cfg->init_scale;
    *out = e.release();
  });
}

void pv_experiment_destroy(pv_experiment* exp) { delete exp; }

pv_status pv_experiment_add_scene(pv_experiment* exp, const char* name, const pv_scene* scene) {
  return guarded("pv_experiment_add_scene", [&] {
    require(exp, "exp");
    require(name, "name");
    require(scene, "scene");
    exp->scenes.push_back({name, scene->sample});
  });
}

pv_status pv_experiment_add_mode(pv_experiment* exp, pv_train_mode mode) {
  return guarded("pv_experiment_add_mode", [&] {
    require(exp, "exp");
    const pv::TrainMode m = to_mode(mode);
    if (std::find(exp->cfg.modes.begin(), exp->cfg.modes.end(), m) == exp->cfg.modes.end()) {
      exp->cfg.modes.push_back(m);
    }
  });
}

pv_status pv_experiment_add_seed(pv_experiment* exp, uint64_t seed) {
  return guarded("pv_experiment_add_seed", [&] {
    require(exp, "exp");
    exp->cfg.seeds.push_back(seed);
  });
}

pv_status pv_experiment_set_model(pv_experiment* exp, const pv_model* model) {
  return guarded("pv_experiment_set_model", [&] {
    require(exp, "exp");
    require(model, "model");
    exp->cfg.model = model->cloud;
  });
}

pv_status pv_experiment_set_threads(pv_experiment* exp, unsigned threads) {
  return guarded("pv_experiment_set_threads", [&] {
    require(exp, "exp");
    exp->cfg.threads = std::max(1u, threads);
  });
}

pv_status pv_experiment_run(pv_experiment* exp) {
  return guarded("pv_experiment_run", [&] {
    require(exp, "exp");
    exp->report.reset();
    exp->report = pv::run_experiment(exp->scenes, exp->cfg);
  });
}

pv_status pv_experiment_write(const pv_experiment* exp, const char* dir) {
  return guarded("pv_experiment_write", [&] {
    require(exp, "exp");
    require(dir, "dir");
    if (!exp->report) throw ApiError(PV_ERR_INVALID_ARGUMENT, "experiment has not run");
    pv::write_experiment(*exp->report, dir);
  });
}

size_t pv_experiment_num_runs(const pv_experiment* exp) {
  return exp && exp->report ? exp->report->runs.size() : 0;
}

pv_status pv_experiment_run_info(const pv_experiment* exp, size_t i, pv_run_info* out) {
  return guarded("pv_experiment_run_info", [&] {
    require(exp, "exp");
    require(out, "out");
    if (!exp->report) throw ApiError(PV_ERR_INVALID_ARGUMENT, "experiment has not run");
    if (i >= exp->report->runs.size()) throw ApiError(PV_ERR_OUT_OF_RANGE, "run index out of range");
    const pv::RunRecord& r = exp->report->runs[i];
    const pv::TrainTrace& t = r.fit.trace;
    *out = {};
    out->scene = r.scene.c_str();
    out->mode = from_mode(r.mode);
    out->seed = r.seed;
    out->diverged = t.diverged ? 1 : 0;
    out->final_l_vf = t.final_l_vf;
    out->final_l_pv = t.final_l_pv;
    out->final_mean_proxy_dist = t.final_mean_proxy_dist;
    out->sign_agreement = t.final_sign_agreement;
    out->max_keypoint_error = t.max_keypoint_error();
    out->vote_success = t.voting_succeeded() ? 1 : 0;
    out->has_eval = r.eval ? 1 : 0;
    if (r.eval) {
      out->eval = {r.eval->add, r.eval->add_s, r.eval->proj2d, r.eval->add_correct ? 1 : 0,
                   r.eval->proj_correct ? 1 : 0};
    }
  });
}

// ---- report ----

pv_status pv_report_build(const char* train_dir, const double* lpv_threshold, pv_report** out) {
  return guarded("pv_report_build", [&] {
    require(train_dir, "train_dir");
    require(out, "out");
    *out = nullptr;
    std::optional<double> thr;
    if (lpv_threshold) thr = *lpv_threshold;
    auto r = std::make_unique<pv_report>();
    r->report = pv::build_report(pv::collect_traces(train_dir), thr);
    *out = r.release();
  });
}

void pv_report_destroy(pv_report* report) { delete report; }

const char* pv_report_table(const pv_report* report) {
  return report ? report->report.table.c_str() : "";
}

const char* pv_report_merged_csv(const pv_report* report) {
  return report ? report->report.merged_csv.c_str() : "";
}

double pv_report_threshold(const pv_report* report) {
  return report ? report->report.lpv_threshold : 0.0;
}

}  // extern "C"
