// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

/* C interface to proxyvote.
 *
 * Every fallible call returns a pv_status. On failure a description is
 * available from pv_last_error() on the same thread until the next call.
 * Handles are opaque and owned by the caller; pass them to the matching
 * *_destroy function exactly once. Destroy functions accept NULL.
 *
 * Arrays are row-major. Poses map object coordinates to camera
 * coordinates: x_cam = R * x_obj + t, with R stored row-major.
 */

#ifndef PROXYVOTE_PROXYVOTE_H_
#define PROXYVOTE_PROXYVOTE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PV_API __declspec(dllexport)
#else
#define PV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pv_status {
  PV_OK = 0,
  PV_ERR_INVALID_ARGUMENT = 1,
  PV_ERR_DEGENERATE_INPUT = 2,
  PV_ERR_DEGENERATE_DIRECTION = 3,
  PV_ERR_BEHIND_CAMERA = 4,
  PV_ERR_DIMENSION_MISMATCH = 5,
  PV_ERR_INSUFFICIENT_SUPPORT = 6,
  PV_ERR_NO_VALID_HYPOTHESIS = 7,
  PV_ERR_TOO_FEW_POINTS = 8,
  PV_ERR_DEGENERATE_CONFIGURATION = 9,
  PV_ERR_PARSE = 10,
  PV_ERR_IO = 11,
  PV_ERR_CONFIG = 12,
  PV_ERR_DIVERGENCE = 13,
  PV_ERR_OUT_OF_RANGE = 14,
  PV_ERR_BUFFER_TOO_SMALL = 15,
  PV_ERR_INTERNAL = 99
} pv_status;

typedef struct pv_point2 {
  double x, y;
} pv_point2;

typedef struct pv_point3 {
  double x, y, z;
} pv_point3;

typedef struct pv_pose {
  double rotation[9];
  double translation[3];
} pv_pose;

typedef struct pv_intrinsics {
  double fx, fy, cx, cy;
} pv_intrinsics;

typedef struct pv_pose_ranges {
  double x_min, x_max;
  double y_min, y_max;
  double z_min, z_max;
  double margin_px;
} pv_pose_ranges;

typedef struct pv_noise_spec {
  double angular_sigma_deg;
  double flip_prob;
  double occlusion_frac;
  uint64_t rng_seed;
} pv_noise_spec;

typedef struct pv_voting_config {
  size_t num_samples;
  double inlier_cos_threshold;
  int refine;
  uint64_t rng_seed;
} pv_voting_config;

typedef enum pv_train_mode {
  PV_MODE_VF_ONLY = 0,
  PV_MODE_VF_PLUS_DPVL = 1,
  PV_MODE_DPVL_ONLY = 2
} pv_train_mode;

typedef struct pv_train_config {
  int iterations;
  double learning_rate;
  int iters_per_epoch;
  int lr_decay;
  double init_scale;
  pv_voting_config voting;
} pv_train_config;

typedef struct pv_eval_record {
  double add;
  double add_s;
  double proj2d;
  int add_correct;
  int proj_correct;
} pv_eval_record;

typedef struct pv_scene_info {
  int width;
  int height;
  size_t num_keypoints;
  size_t mask_count;
  pv_pose pose;
  pv_intrinsics intrinsics;
} pv_scene_info;

typedef struct pv_vote {
  pv_point2 location;
  size_t votes;
  int refined;
  int ok;
} pv_vote;

typedef struct pv_run_info {
  const char* scene;
  pv_train_mode mode;
  uint64_t seed;
  int diverged;
  double final_l_vf;
  double final_l_pv;
  double final_mean_proxy_dist;
  double sign_agreement;
  double max_keypoint_error;
  int vote_success;
  int has_eval;
  pv_eval_record eval;
} pv_run_info;

typedef struct pv_model pv_model;
typedef struct pv_scene pv_scene;
typedef struct pv_fields pv_fields;
typedef struct pv_experiment pv_experiment;
typedef struct pv_report pv_report;

/* ---- library ---- */
PV_API const char* pv_version(void);
PV_API const char* pv_status_name(pv_status status);
PV_API const char* pv_last_error(void);
/* Shortest round-trip decimal text of v, NUL-terminated. */
PV_API pv_status pv_format_double(double v, char* buf, size_t buf_size);
/* Named sub-stream of a base seed. */
PV_API uint64_t pv_derive_seed(uint64_t base, const char* stream, uint64_t index);
PV_API pv_status pv_parse_train_mode(const char* name, pv_train_mode* out);
PV_API const char* pv_train_mode_name(pv_train_mode mode);

PV_API void pv_pose_ranges_default(pv_pose_ranges* out);
PV_API void pv_voting_config_default(pv_voting_config* out);
PV_API void pv_train_config_default(pv_train_config* out);
PV_API void pv_default_intrinsics(int width, int height, pv_intrinsics* out);

/* ---- geometry ---- */
PV_API pv_status pv_point_line_distance(pv_point2 p, pv_point2 v, pv_point2 k,
                                        double* out);
PV_API pv_status pv_project(const pv_pose* pose, const pv_intrinsics* intr,
                            pv_point3 x, pv_point2* out);

/* ---- models ---- */
PV_API pv_status pv_model_load(const char* path, pv_model** out);
PV_API pv_status pv_model_create(const pv_point3* points, size_t n, pv_model** out);
PV_API pv_status pv_model_create_box(double sx, double sy, double sz, int per_edge,
                                     pv_model** out);
PV_API void pv_model_destroy(pv_model* model);
PV_API size_t pv_model_num_points(const pv_model* model);
PV_API pv_status pv_model_points(const pv_model* model, pv_point3* out, size_t capacity);
PV_API pv_status pv_model_set_symmetric(pv_model* model, int symmetric);
PV_API int pv_model_symmetric(const pv_model* model);
PV_API pv_status pv_model_diameter(const pv_model* model, double* out);
/* Farthest point sampling from the point farthest from the centroid. */
PV_API pv_status pv_model_fps(const pv_model* model, size_t n, pv_point3* out);

/* ---- scenes ---- */
/* Samples a pose from `seed` and renders a scene with n FPS keypoints.
 * ranges may be NULL for the defaults. */
PV_API pv_status pv_scene_generate(const pv_model* model, size_t num_keypoints, int width,
                                   int height, uint64_t seed, const pv_pose_ranges* ranges,
                                   pv_scene** out);
PV_API pv_status pv_scene_from_pose(const pv_model* model, size_t num_keypoints,
                                    const pv_pose* pose, const pv_intrinsics* intr,
                                    int width, int height, pv_scene** out);
PV_API pv_status pv_scene_read(const char* dir, pv_scene** out);
PV_API pv_status pv_scene_write(const pv_scene* scene, const char* dir);
PV_API void pv_scene_destroy(pv_scene* scene);
PV_API pv_status pv_scene_info_get(const pv_scene* scene, pv_scene_info* out);
PV_API pv_status pv_scene_keypoint(const pv_scene* scene, size_t k, pv_point2* image,
                                   pv_point3* object);

/* ---- field sets (mask plus one direction field per keypoint) ---- */
PV_API pv_status pv_fields_from_scene(const pv_scene* scene, pv_fields** out);
/* Corrupts the scene's exact fields. */
PV_API pv_status pv_fields_corrupt(const pv_scene* scene, const pv_noise_spec* noise,
                                   pv_fields** out);
PV_API pv_status pv_fields_read(const char* dir, pv_fields** out);
PV_API pv_status pv_fields_write(const pv_fields* fields, const char* dir);
PV_API void pv_fields_destroy(pv_fields* fields);
PV_API size_t pv_fields_count(const pv_fields* fields);
PV_API size_t pv_fields_mask_count(const pv_fields* fields);
/* Copies field k (width*height directions) into out. */
PV_API pv_status pv_fields_get(const pv_fields* fields, size_t k, pv_point2* out,
                               size_t capacity);

/* Votes every field; out holds pv_fields_count() entries. */
PV_API pv_status pv_vote_all(const pv_fields* fields, const pv_voting_config* cfg,
                             pv_vote* out);
/* Votes, then EPnP. *has_pose is 0 when fewer than 4 keypoints voted or the
 * solver failed; votes may be NULL. */
PV_API pv_status pv_estimate_pose(const pv_scene* scene, const pv_fields* fields,
                                  const pv_voting_config* cfg, pv_vote* votes,
                                  pv_pose* pose, int* has_pose);

/* ---- pose ---- */
PV_API pv_status pv_solve_epnp(const pv_point3* object, const pv_point2* image, size_t n,
                               const pv_intrinsics* intr, pv_pose* out);
PV_API pv_status pv_refine_pose(const pv_pose* init, const pv_point3* object,
                                const pv_point2* image, size_t n,
                                const pv_intrinsics* intr, int iters, pv_pose* out);
PV_API pv_status pv_reprojection_rmse(const pv_pose* pose, const pv_point3* object,
                                      const pv_point2* image, size_t n,
                                      const pv_intrinsics* intr, double* out);
PV_API pv_status pv_evaluate_pose(const pv_model* model, const pv_pose* gt,
                                  const pv_pose* est, const pv_intrinsics* intr,
                                  double diameter, pv_eval_record* out);

/* Strict thresholds: add < 0.1 * diameter, proj < 5 px. */
PV_API pv_status pv_judge(double add, double diameter, double proj, int* add_correct,
                          int* proj_correct);

/* ---- training experiments ---- */
PV_API pv_status pv_experiment_create(const pv_train_config* cfg, pv_experiment** out);
PV_API void pv_experiment_destroy(pv_experiment* exp);
PV_API pv_status pv_experiment_add_scene(pv_experiment* exp, const char* name,
                                         const pv_scene* scene);
PV_API pv_status pv_experiment_add_mode(pv_experiment* exp, pv_train_mode mode);
PV_API pv_status pv_experiment_add_seed(pv_experiment* exp, uint64_t seed);
/* Enables pose scoring of each run; the model is copied. */
PV_API pv_status pv_experiment_set_model(pv_experiment* exp, const pv_model* model);
PV_API pv_status pv_experiment_set_threads(pv_experiment* exp, unsigned threads);
PV_API pv_status pv_experiment_run(pv_experiment* exp);
PV_API pv_status pv_experiment_write(const pv_experiment* exp, const char* dir);
PV_API size_t pv_experiment_num_runs(const pv_experiment* exp);
/* String members stay valid until the experiment is destroyed or re-run. */
PV_API pv_status pv_experiment_run_info(const pv_experiment* exp, size_t i,
                                        pv_run_info* out);

/* ---- ablation report ---- */
/* threshold may be NULL for the default. */
PV_API pv_status pv_report_build(const char* train_dir, const double* lpv_threshold,
                                 pv_report** out);
PV_API void pv_report_destroy(pv_report* report);
PV_API const char* pv_report_table(const pv_report* report);
PV_API const char* pv_report_merged_csv(const pv_report* report);
PV_API double pv_report_threshold(const pv_report* report);

#ifdef __cplusplus
}
#endif

#endif  // PROXYVOTE_PROXYVOTE_H_
