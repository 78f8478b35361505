// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cli_support.hpp"

namespace fs = std::filesystem;
using namespace pvcli;

namespace {

std::string scene_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", i);
  return buf;
}

void require_nonempty(const Params& p, const std::string& key) {
  if (p.get<std::string>(key).empty()) throw UsageError("--" + key + " is required");
}

void require_range(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

pv_voting_config voting_from(const Params& p) {
  pv_voting_config v;
  pv_voting_config_default(&v);
  v.num_samples = p.get<std::size_t>("vote_samples");
  v.inlier_cos_threshold = p.get<double>("vote_cos");
  v.refine = p.get<bool>("vote_refine") ? 1 : 0;
  require_range(v.num_samples >= 1, "--vote-samples must be at least 1");
  require_range(v.inlier_cos_threshold > 0.0 && v.inlier_cos_threshold < 1.0,
                "--vote-cos must lie in (0, 1)");
  return v;
}

void add_voting_options(Params& p) {
  pv_voting_config v;
  pv_voting_config_default(&v);
  p.option<std::size_t>("--vote-samples", "vote_samples", v.num_samples,
                        "RANSAC hypotheses per keypoint");
  p.option<double>("--vote-cos", "vote_cos", v.inlier_cos_threshold,
                   "inlier cosine threshold");
  p.option<bool>("--vote-refine", "vote_refine", v.refine != 0,
                 "least-squares refinement over inliers (true/false)");
}

// Field set for scene `name`: --estimates/<name>, else <scene>/estimate, else
// the scene's exact fields.
FieldsPtr fields_for(const std::string& scenes_dir, const std::string& estimates,
                     const std::string& name, const pv_scene* scene) {
  if (!estimates.empty()) return read_fields((fs::path(estimates) / name).string());
  const fs::path own = fs::path(scenes_dir) / name / "estimate";
  if (fs::is_directory(own)) return read_fields(own.string());
  pv_fields* raw = nullptr;
  check(pv_fields_from_scene(scene, &raw));
  return FieldsPtr(raw);
}

// ---- gen ----

struct GenCmd {
  Params p;
  explicit GenCmd(CLI::App* app) : p(app, "gen") {
    p.path("--model", "model", "model file (ASCII PLY or OBJ)");
    p.option<int>("--n", "n", 10, "number of scenes");
    p.option<std::uint64_t>("--seed", "seed", 0, "base seed");
    p.path("--out", "out", "output directory");
    p.option<int>("--width", "width", 64, "image width");
    p.option<int>("--height", "height", 64, "image height");
    p.option<int>("--keypoints", "keypoints", 8, "FPS keypoints per scene");
    p.option<double>("--noise-deg", "noise_deg", 0.0,
                     "angular noise sigma in degrees for the estimate/ fields");
    p.option<double>("--flip-prob", "flip_prob", 0.0, "per-pixel sign flip probability");
    p.option<double>("--occlusion", "occlusion", 0.0, "occluded mask fraction");
  }

  int run() {
    const auto started = std::chrono::steady_clock::now();
    p.resolve();
    require_nonempty(p, "model");
    require_nonempty(p, "out");
    const int n = p.get<int>("n");
    const int width = p.get<int>("width");
    const int height = p.get<int>("height");
    const int keypoints = p.get<int>("keypoints");
    const std::uint64_t seed = p.get<std::uint64_t>("seed");
    const double noise_deg = p.get<double>("noise_deg");
    const double flip = p.get<double>("flip_prob");
    const double occ = p.get<double>("occlusion");
    require_range(n >= 1, "--n must be at least 1");
    require_range(width >= 8 && height >= 8, "--width and --height must be at least 8");
    require_range(keypoints >= 4, "--keypoints must be at least 4");
    require_range(noise_deg >= 0.0, "--noise-deg must be non-negative");
    require_range(flip >= 0.0 && flip <= 1.0, "--flip-prob must lie in [0, 1]");
    require_range(occ >= 0.0 && occ < 1.0, "--occlusion must lie in [0, 1)");
    const bool noisy = noise_deg > 0.0 || flip > 0.0 || occ > 0.0;

    const ModelPtr model = load_model(p.get<std::string>("model"), false);
    const std::string out = p.get<std::string>("out");
    fs::create_directories(out);
    parallel_for(static_cast<std::size_t>(n), thread_budget(), [&](std::size_t i) {
      pv_scene* raw = nullptr;
      check(pv_scene_generate(model.get(), static_cast<size_t>(keypoints), width, height,
                              pv_derive_seed(seed, "scene", i), nullptr, &raw));
      const ScenePtr scene(raw);
      const std::string dir = (fs::path(out) / scene_name(i)).string();
      check(pv_scene_write(scene.get(), dir.c_str()));
      if (noisy) {
        const pv_noise_spec spec{noise_deg, flip, occ, pv_derive_seed(seed, "noise", i)};
        pv_fields* fraw = nullptr;
        check(pv_fields_corrupt(scene.get(), &spec, &fraw));
        const FieldsPtr fields(fraw);
        check(pv_fields_write(fields.get(), (fs::path(dir) / "estimate").string().c_str()));
      }
    });
    write_manifest(p, out, {{"base", seed}, {"streams", {"scene", "noise"}}}, started);
    std::cout << "wrote " << n << " scenes to " << out << "\n";
    return kExitOk;
  }
};

// ---- train ----

struct TrainCmd {
  Params p;
  explicit TrainCmd(CLI::App* app) : p(app, "train") {
    pv_train_config t;
    pv_train_config_default(&t);
    p.path("--scenes", "scenes", "scene directory from gen");
    p.option<std::vector<std::string>>("--mode", "modes", {"vf_plus_dpvl"},
                                       "vf_only, vf_plus_dpvl or dpvl_only; repeatable");
    p.option<int>("--iters", "iters", t.iterations, "optimizer iterations per run");
    p.option<std::uint64_t>("--seed", "seed", 0, "base seed; run r uses seed + r");
    p.option<int>("--runs", "runs", 1, "seeds per scene and mode");
    p.option<double>("--lr", "lr", t.learning_rate, "Adam learning rate");
    p.option<int>("--iters-per-epoch", "iters_per_epoch", t.iters_per_epoch,
                  "iterations per schedule epoch");
    p.option<bool>("--lr-decay", "lr_decay", t.lr_decay != 0, "step learning-rate decay");
    p.option<double>("--init-scale", "init_scale", t.init_scale,
                     "std-dev of the random initial field components");
    p.path("--model", "model", "model file; enables pose scoring");
    p.flag("--symmetric", "symmetric", "score poses with ADD-S");
    p.path("--out", "out", "output directory");
  }

  int run() {
    const auto started = std::chrono::steady_clock::now();
    p.resolve();
    require_nonempty(p, "scenes");
    require_nonempty(p, "out");
    pv_train_config t;
    pv_train_config_default(&t);
    t.iterations = p.get<int>("iters");
    t.learning_rate = p.get<double>("lr");
    t.iters_per_epoch = p.get<int>("iters_per_epoch");
    t.lr_decay = p.get<bool>("lr_decay") ? 1 : 0;
    t.init_scale = p.get<double>("init_scale");
    const int runs = p.get<int>("runs");
    const std::uint64_t seed = p.get<std::uint64_t>("seed");
    require_range(t.iterations >= 1, "--iters must be at least 1");
    require_range(t.learning_rate > 0.0, "--lr must be positive");
    require_range(t.iters_per_epoch >= 1, "--iters-per-epoch must be at least 1");
    require_range(t.init_scale > 0.0, "--init-scale must be positive");
    require_range(runs >= 1, "--runs must be at least 1");

    std::vector<pv_train_mode> modes;
    for (const std::string& name : p.get<std::vector<std::string>>("modes")) {
      pv_train_mode m;
      if (pv_parse_train_mode(name.c_str(), &m) != PV_OK) {
        throw UsageError("unknown mode '" + name + "'");
      }
      modes.push_back(m);
    }
    require_range(!modes.empty(), "at least one --mode is required");

    pv_experiment* raw = nullptr;
    check(pv_experiment_create(&t, &raw));
    const ExperimentPtr exp(raw);
    const std::string scenes_dir = p.get<std::string>("scenes");
    for (const std::string& name : list_scenes(scenes_dir)) {
      const ScenePtr scene = read_scene((fs::path(scenes_dir) / name).string());
      check(pv_experiment_add_scene(exp.get(), name.c_str(), scene.get()));
    }
    for (pv_train_mode m : modes) check(pv_experiment_add_mode(exp.get(), m));
    for (int r = 0; r < runs; ++r) {
      check(pv_experiment_add_seed(exp.get(), seed + static_cast<std::uint64_t>(r)));
    }
    if (const std::string model_path = p.get<std::string>("model"); !model_path.empty()) {
      const ModelPtr model = load_model(model_path, p.get<bool>("symmetric"));
      check(pv_experiment_set_model(exp.get(), model.get()));
    }
    check(pv_experiment_set_threads(exp.get(), thread_budget()));
    check(pv_experiment_run(exp.get()));
    const std::string out = p.get<std::string>("out");
    check(pv_experiment_write(exp.get(), out.c_str()));

    for (std::size_t i = 0; i < pv_experiment_num_runs(exp.get()); ++i) {
      pv_run_info info;
      check(pv_experiment_run_info(exp.get(), i, &info));
      std::cout << pv_train_mode_name(info.mode) << " " << info.scene << " seed " << info.seed
                << ": mean proxy dist " << fmt(info.final_mean_proxy_dist) << ", voting "
                << (info.vote_success ? "ok" : "FAILED") << " (max error "
                << fmt(info.max_keypoint_error) << " px)" << (info.diverged ? ", diverged" : "")
                << "\n";
    }
    write_manifest(p, out, {{"base", seed}, {"runs", runs}, {"streams", {"init", "voting"}}},
                   started);
    return kExitOk;
  }
};

// ---- vote ----

struct VoteCmd {
  Params p;
  explicit VoteCmd(CLI::App* app) : p(app, "vote") {
    p.path("--scenes", "scenes", "scene directory from gen");
    p.path("--estimates", "estimates",
                 "directory of per-scene field sets (default: each scene's own)");
    p.option<std::uint64_t>("--seed", "seed", 0, "base seed");
    p.path("--out", "out", "output directory");
    add_voting_options(p);
  }

  int run() {
    const auto started = std::chrono::steady_clock::now();
    p.resolve();
    require_nonempty(p, "scenes");
    require_nonempty(p, "out");
    const pv_voting_config base = voting_from(p);
    const std::uint64_t seed = p.get<std::uint64_t>("seed");
    const std::string scenes_dir = p.get<std::string>("scenes");
    const std::string estimates = p.get<std::string>("estimates");
    const std::vector<std::string> names = list_scenes(scenes_dir);

    std::vector<std::string> rows(names.size());
    parallel_for(names.size(), thread_budget(), [&](std::size_t i) {
      const ScenePtr scene = read_scene((fs::path(scenes_dir) / names[i]).string());
      const FieldsPtr fields = fields_for(scenes_dir, estimates, names[i], scene.get());
      pv_scene_info info;
      check(pv_scene_info_get(scene.get(), &info));
      if (pv_fields_count(fields.get()) != info.num_keypoints) {
        throw RuntimeFailure(names[i] + ": field count does not match keypoint count");
      }
      pv_voting_config cfg = base;
      cfg.rng_seed = pv_derive_seed(seed, "voting", i);
      std::vector<pv_vote> votes(info.num_keypoints);
      check(pv_vote_all(fields.get(), &cfg, votes.data()));
      for (std::size_t k = 0; k < votes.size(); ++k) {
        pv_point2 truth;
        check(pv_scene_keypoint(scene.get(), k, &truth, nullptr));
        const pv_vote& v = votes[k];
        rows[i] += names[i] + "," + std::to_string(k) + ",";
        if (v.ok) {
          const double err = std::hypot(v.location.x - truth.x, v.location.y - truth.y);
          rows[i] += fmt(v.location.x) + "," + fmt(v.location.y) + "," +
                     std::to_string(v.votes) + "," + std::to_string(v.refined) + ",1," +
                     fmt(err) + "\n";
        } else {
          rows[i] += ",,0,0,0,\n";
        }
      }
    });
    std::string csv = "scene,keypoint,u,v,votes,refined,ok,error_px\n";
    for (const std::string& r : rows) csv += r;
    const std::string out = p.get<std::string>("out");
    write_text_atomic((fs::path(out) / "votes.csv").string(), csv);
    write_manifest(p, out, {{"base", seed}, {"streams", {"voting"}}}, started);
    std::cout << "voted " << names.size() << " scenes into " << out << "/votes.csv\n";
    return kExitOk;
  }
};

// ---- eval ----

struct EvalCmd {
  Params p;
  explicit EvalCmd(CLI::App* app) : p(app, "eval") {
    p.path("--scenes", "scenes", "scene directory from gen");
    p.path("--model", "model", "model file used to generate the scenes");
    p.flag("--symmetric", "symmetric", "judge ADD with the symmetric ADD-S metric");
    p.path("--estimates", "estimates",
                 "directory of per-scene field sets (default: each scene's own)");
    p.option<std::uint64_t>("--seed", "seed", 0, "base seed");
    p.path("--out", "out", "output directory");
    add_voting_options(p);
  }

  struct Row {
    bool has_pose = false;
    pv_eval_record rec{};
  };

  int run() {
    const auto started = std::chrono::steady_clock::now();
    p.resolve();
    require_nonempty(p, "scenes");
    require_nonempty(p, "model");
    require_nonempty(p, "out");
    const pv_voting_config base = voting_from(p);
    const std::uint64_t seed = p.get<std::uint64_t>("seed");
    const bool symmetric = p.get<bool>("symmetric");
    const std::string scenes_dir = p.get<std::string>("scenes");
    const std::string estimates = p.get<std::string>("estimates");
    const ModelPtr model = load_model(p.get<std::string>("model"), symmetric);
    double diameter = 0.0;
    check(pv_model_diameter(model.get(), &diameter));
    const std::vector<std::string> names = list_scenes(scenes_dir);

    std::vector<Row> rows(names.size());
    parallel_for(names.size(), thread_budget(), [&](std::size_t i) {
      const ScenePtr scene = read_scene((fs::path(scenes_dir) / names[i]).string());
      const FieldsPtr fields = fields_for(scenes_dir, estimates, names[i], scene.get());
      pv_scene_info info;
      check(pv_scene_info_get(scene.get(), &info));
      if (pv_fields_count(fields.get()) != info.num_keypoints) {
        throw RuntimeFailure(names[i] + ": field count does not match keypoint count");
      }
      pv_voting_config cfg = base;
      cfg.rng_seed = pv_derive_seed(seed, "voting", i);
      pv_pose est;
      int has_pose = 0;
      check(pv_estimate_pose(scene.get(), fields.get(), &cfg, nullptr, &est, &has_pose));
      rows[i].has_pose = has_pose != 0;
      if (has_pose) {
        check(pv_evaluate_pose(model.get(), &info.pose, &est, &info.intrinsics, diameter,
                               &rows[i].rec));
      }
    });

    std::string csv = symmetric
                          ? "scene,pose_ok,add,add_s,proj2d,add_correct,proj_correct\n"
                          : "scene,pose_ok,add,proj2d,add_correct,proj_correct\n";
    std::size_t add_ok = 0, add_s_ok = 0, proj_ok = 0, failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      if (!r.has_pose) {
        ++failures;
        csv += names[i] + (symmetric ? ",0,,,,0,0\n" : ",0,,,0,0\n");
        continue;
      }
      int a = 0, pr = 0, as = 0;
      check(pv_judge(r.rec.add, diameter, r.rec.proj2d, &a, &pr));
      check(pv_judge(r.rec.add_s, diameter, r.rec.proj2d, &as, &pr));
      add_ok += static_cast<std::size_t>(a);
      add_s_ok += static_cast<std::size_t>(as);
      proj_ok += static_cast<std::size_t>(pr);
      csv += names[i] + ",1," + fmt(r.rec.add) + "," +
             (symmetric ? fmt(r.rec.add_s) + "," : std::string()) + fmt(r.rec.proj2d) + "," +
             std::to_string(r.rec.add_correct) + "," + std::to_string(r.rec.proj_correct) + "\n";
    }
    const double n = static_cast<double>(rows.size());
    json summary;
    summary["scenes"] = rows.size();
    summary["pose_failures"] = failures;
    summary["symmetric"] = symmetric;
    summary["diameter"] = json::parse(fmt(diameter));
    summary["add_threshold"] = "less than 10 percent of the diameter";
    summary["proj_threshold"] = "less than 5 pixels";
    summary["add_accuracy"] = json::parse(fmt(static_cast<double>(add_ok) / n));
    if (symmetric) summary["add_s_accuracy"] = json::parse(fmt(static_cast<double>(add_s_ok) / n));
    summary["proj_accuracy"] = json::parse(fmt(static_cast<double>(proj_ok) / n));

    const std::string out = p.get<std::string>("out");
    write_text_atomic((fs::path(out) / "eval.csv").string(), csv);
    write_text_atomic((fs::path(out) / "summary.json").string(), summary.dump(2) + "\n");
    write_manifest(p, out, {{"base", seed}, {"streams", {"voting"}}}, started);
    std::cout << "ADD accuracy " << fmt(static_cast<double>(add_ok) / n);
    if (symmetric) std::cout << ", ADD-S accuracy " << fmt(static_cast<double>(add_s_ok) / n);
    std::cout << ", 2D projection accuracy " << fmt(static_cast<double>(proj_ok) / n) << " over "
              << rows.size() << " scenes\n";
    return kExitOk;
  }
};

// ---- report ----

struct ReportCmd {
  Params p;
  explicit ReportCmd(CLI::App* app) : p(app, "report") {
    p.path("--train-dir", "train_dir", "output directory of train");
    p.option<double>("--lpv-threshold", "lpv_threshold", -1.0,
                     "l_pv level for iterations-to-threshold (negative: automatic)");
    p.path("--out", "out", "write merged.csv and table.txt here");
  }

  int run() {
    const auto started = std::chrono::steady_clock::now();
    p.resolve();
    require_nonempty(p, "train_dir");
    const double thr = p.get<double>("lpv_threshold");
    pv_report* raw = nullptr;
    check(pv_report_build(p.get<std::string>("train_dir").c_str(), thr >= 0.0 ? &thr : nullptr,
                          &raw));
    const ReportPtr report(raw);
    std::cout << pv_report_table(report.get());
    if (const std::string out = p.get<std::string>("out"); !out.empty()) {
      write_text_atomic((fs::path(out) / "merged.csv").string(),
                        pv_report_merged_csv(report.get()));
      write_text_atomic((fs::path(out) / "table.txt").string(), pv_report_table(report.get()));
      write_manifest(p, out, json::object(), started);
    }
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proxyvote: proxy voting loss, keypoint voting and pose evaluation"};
  app.set_version_flag("--version", pv_version());
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("gen", "generate synthetic scenes");
  CLI::App* train = app.add_subcommand("train", "fit vector fields per scene and mode");
  CLI::App* vote = app.add_subcommand("vote", "vote keypoints from field sets");
  CLI::App* eval = app.add_subcommand("eval", "vote, solve poses and score them");
  CLI::App* report = app.add_subcommand("report", "compare training traces across modes");
  GenCmd gen_cmd(gen);
  TrainCmd train_cmd(train);
  VoteCmd vote_cmd(vote);
  EvalCmd eval_cmd(eval);
  ReportCmd report_cmd(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return gen_cmd.run();
    if (train->parsed()) return train_cmd.run();
    if (vote->parsed()) return vote_cmd.run();
    if (eval->parsed()) return eval_cmd.run();
    if (report->parsed()) return report_cmd.run();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RuntimeFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
