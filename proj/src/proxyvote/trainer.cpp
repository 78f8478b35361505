// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "proxyvote/error.hpp"
#include "proxyvote/io.hpp"
#include "proxyvote/pipeline.hpp"
#include "proxyvote/pnp.hpp"
#include "proxyvote/random.hpp"

namespace proxyvote {

namespace fs = std::filesystem;

namespace {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  if (!cfg.lr_decay) return cfg.learning_rate;
  const int steps = epoch / std::max(cfg.lr_decay_every_epochs, 1);
  return std::max(cfg.learning_rate * std::pow(cfg.lr_decay_factor, steps),
                  cfg.lr_floor);
}

struct FieldLosses {
  double l_vf = 0.0;
  double l_pv = 0.0;
  double mean_proxy_dist = 0.0;
};

FieldLosses evaluate_losses(const SceneSample& sample,
                            std::span<const VectorField> fields) {
  const double m = static_cast<double>(std::max<std::size_t>(sample.mask.count(), 1));
  FieldLosses out;
  ProxyDistanceStats pd;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    out.l_vf += vf_loss(fields[k], sample.gt_fields[k], sample.mask).value / m;
    out.l_pv += dpvl(fields[k], sample.mask, sample.keypoints2[k]).value / m;
    const ProxyDistanceStats s = proxy_distance(fields[k], sample.mask, sample.keypoints2[k]);
    pd.sum += s.sum;
    pd.count += s.count;
  }
  out.mean_proxy_dist = pd.mean();
  return out;
}

std::string json_number(double v) {
  return std::isfinite(v) ? format_double(v) : std::string("null");
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::VfOnly: return "vf_only";
    case TrainMode::VfPlusDpvl: return "vf_plus_dpvl";
    case TrainMode::DpvlOnly: return "dpvl_only";
  }
  return "unknown";
}

std::optional<TrainMode> parse_train_mode(std::string_view name) {
  for (TrainMode m : {TrainMode::VfOnly, TrainMode::VfPlusDpvl, TrainMode::DpvlOnly}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

double TrainTrace::max_keypoint_error() const {
  double worst = 0.0;
  for (double e : keypoint_errors) worst = std::max(worst, e);
  return keypoint_errors.empty() ? std::numeric_limits<double>::infinity() : worst;
}

bool TrainTrace::voting_succeeded(double tol) const {
  return !diverged && max_keypoint_error() <= tol;
}

std::vector<VectorField> random_init(const SceneSample& sample, std::uint64_t seed,
                                     double scale) {
  Rng rng(seed);
  std::vector<VectorField> out;
  for (std::size_t k = 0; k < sample.gt_fields.size(); ++k) {
    VectorField f(sample.width, sample.height);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!sample.mask.contains(i)) continue;
      const double vx = scale * rng.normal();
      const double vy = scale * rng.normal();
      f[i] = {vx, vy};
    }
    out.push_back(std::move(f));
  }
  return out;
}

void score_voting(const SceneSample& sample, std::span<const VectorField> fields,
                  const VotingConfig& voting, TrainTrace& trace) {
  trace.voted.clear();
  trace.votes.clear();
  trace.keypoint_errors.clear();
  for (const KeypointVote& kv : vote_all(sample.mask, fields, voting)) {
    const std::size_t k = trace.voted.size();
    trace.voted.push_back(kv.location);
    trace.votes.push_back(kv.votes);
    trace.keypoint_errors.push_back(kv.ok ? distance(kv.location, sample.keypoints2[k])
                                          : std::numeric_limits<double>::infinity());
  }
  trace.final_sign_agreement = sign_agreement(sample.mask, fields, sample.keypoints2);
}

FitResult fit_field(const SceneSample& sample, std::span<const VectorField> init,
                    const TrainConfig& cfg) {
  if (!cfg.is_valid()) throw Error(ErrorCode::InvalidArgument, "fit_field: invalid config");
  if (init.size() != sample.gt_fields.size() ||
      sample.keypoints2.size() != sample.gt_fields.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "fit_field: need one initial field per keypoint");
  }
  for (const VectorField& f : init) {
    if (!f.same_shape(sample.mask)) {
      throw Error(ErrorCode::DimensionMismatch, "fit_field: init/mask shapes differ");
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!std::isfinite(f[i].vx) || !std::isfinite(f[i].vy)) {
        throw Error(ErrorCode::InvalidArgument, "fit_field: non-finite initial field");
      }
    }
  }

  FitResult out{std::vector<VectorField>(init.begin(), init.end()), {}};
  const std::vector<std::size_t> pixels = sample.mask.indices();
  const double inv_m = 1.0 / static_cast<double>(std::max<std::size_t>(pixels.size(), 1));
  std::vector<AdamState> adam(init.size());
  for (AdamState& a : adam) {
    a.m.assign(2 * pixels.size(), 0.0);
    a.v.assign(2 * pixels.size(), 0.0);
  }
  double b1_pow = 1.0;
  double b2_pow = 1.0;
  out.trace.records.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    const int epoch = it / cfg.iters_per_epoch;
    const LossWeights w = schedule_weights(epoch, cfg.schedule);
    const double beta = cfg.mode == TrainMode::VfOnly ? 0.0 : w.beta;
    const bool use_vf = cfg.mode != TrainMode::DpvlOnly;
    const double lr = learning_rate_at(cfg, epoch);
    b1_pow *= cfg.adam_beta1;
    b2_pow *= cfg.adam_beta2;

    TraceRecord rec{it, 0.0, 0.0, 0.0, w.alpha, beta};
    ProxyDistanceStats pd;
    for (std::size_t k = 0; k < out.fields.size(); ++k) {
      VectorField& field = out.fields[k];
      const LossReport vf = vf_loss(field, sample.gt_fields[k], sample.mask);
      const LossReport pv = dpvl(field, sample.mask, sample.keypoints2[k]);
      const ProxyDistanceStats s = proxy_distance(field, sample.mask, sample.keypoints2[k]);
      rec.l_vf += vf.value * inv_m;
      rec.l_pv += pv.value * inv_m;
      pd.sum += s.sum;
      pd.count += s.count;

      AdamState& st = adam[k];
      for (std::size_t j = 0; j < pixels.size(); ++j) {
        const std::size_t i = pixels[j];
        double g[2] = {beta * pv.grad[i].vx, beta * pv.grad[i].vy};
        if (use_vf) {
          g[0] += vf.grad[i].vx;
          g[1] += vf.grad[i].vy;
        }
        double* param[2] = {&field[i].vx, &field[i].vy};
        for (int c = 0; c < 2; ++c) {
          const double gc = g[c] * inv_m;
          double& m = st.m[2 * j + c];
          double& v = st.v[2 * j + c];
          m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * gc;
          v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * gc * gc;
          const double mhat = m / (1.0 - b1_pow);
          const double vhat = v / (1.0 - b2_pow);
          *param[c] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
      }
    }
    rec.mean_proxy_dist = pd.mean();
    out.trace.records.push_back(rec);
    if (!std::isfinite(rec.l_vf) || !std::isfinite(rec.l_pv) ||
        !std::isfinite(rec.mean_proxy_dist)) {
      out.trace.diverged = true;
      std::ostringstream msg;
      msg << "non-finite loss at iteration " << it;
      out.trace.failure = msg.str();
      return out;
    }
  }

  const FieldLosses fin = evaluate_losses(sample, out.fields);
  out.trace.final_l_vf = fin.l_vf;
  out.trace.final_l_pv = fin.l_pv;
  out.trace.final_mean_proxy_dist = fin.mean_proxy_dist;
  score_voting(sample, out.fields, cfg.voting, out.trace);
  return out;
}

ExperimentReport run_experiment(std::span<const ExperimentScene> scenes,
                                const ExperimentConfig& cfg) {
  if (scenes.empty()) throw Error(ErrorCode::InvalidArgument, "run_experiment: no scenes");
  if (cfg.modes.empty() || cfg.seeds.empty()) {
    throw Error(ErrorCode::InvalidArgument, "run_experiment: need at least one mode and seed");
  }
  ExperimentReport report;
  if (cfg.model) report.diameter = model_diameter(*cfg.model);

  struct Job {
    std::size_t scene;
    std::uint64_t seed;
    TrainMode mode;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (std::uint64_t seed : cfg.seeds) {
      for (TrainMode mode : cfg.modes) jobs.push_back({s, seed, mode});
    }
  }
  report.runs.resize(jobs.size());

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const SceneSample& sample = scenes[job.scene].sample;
    TrainConfig tc = cfg.base;
    tc.mode = job.mode;
    tc.rng_seed = job.seed;
    tc.voting.rng_seed = derive_seed(job.seed, "voting", job.scene);
    const auto init = random_init(sample, derive_seed(job.seed, "init", job.scene),
                                  cfg.init_scale);
    RunRecord& rec = report.runs[j];
    rec.scene = scenes[job.scene].name;
    rec.mode = job.mode;
    rec.seed = job.seed;
    rec.mask = sample.mask;
    rec.fit = fit_field(sample, init, tc);
    if (!cfg.model || rec.fit.trace.diverged) return;

    std::vector<Correspondence> corrs;
    for (std::size_t k = 0; k < sample.keypoints3.size(); ++k) {
      if (std::isfinite(rec.fit.trace.keypoint_errors[k])) {
        corrs.push_back({sample.keypoints3[k], rec.fit.trace.voted[k]});
      }
    }
    try {
      rec.pose = solve_epnp(corrs, sample.intr);
      rec.eval = evaluate_pose(sample.pose, *rec.pose, cfg.model->points, sample.intr,
                               report.diameter, cfg.model->symmetric);
    } catch (const Error&) {
      rec.pose.reset();
      rec.eval.reset();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads,
                                                           static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return report;
}

std::string trace_to_csv(const TrainTrace& trace) {
  std::string out = "iter,l_vf,l_pv,mean_proxy_dist,alpha,beta\n";
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.iter) + "," + format_double(r.l_vf) + "," +
           format_double(r.l_pv) + "," + format_double(r.mean_proxy_dist) + "," +
           format_double(r.alpha) + "," + format_double(r.beta) + "\n";
  }
  return out;
}

std::vector<TraceRecord> trace_from_csv(const std::string& text,
                                        const std::string& source) {
  std::vector<TraceRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "iter,l_vf,l_pv,mean_proxy_dist,alpha,beta") {
        throw Error(ErrorCode::Parse, source + ":1: unexpected trace header");
      }
      continue;
    }
    if (line.empty()) continue;
    TraceRecord r;
    double* slots[5] = {&r.l_vf, &r.l_pv, &r.mean_proxy_dist, &r.alpha, &r.beta};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto res = std::from_chars(p, end, r.iter);
    bool ok = res.ec == std::errc();
    p = res.ptr;
    for (double* s : slots) {
      if (!ok || p == end || *p != ',') {
        ok = false;
        break;
      }
      res = std::from_chars(p + 1, end, *s);
      ok = res.ec == std::errc();
      p = res.ptr;
    }
    if (!ok || p != end) {
      std::ostringstream msg;
      msg << source << ":" << lineno << ": malformed trace record";
      throw Error(ErrorCode::Parse, msg.str());
    }
    out.push_back(r);
  }
  return out;
}

void write_experiment(const ExperimentReport& report, const std::string& dir) {
  using nlohmann::ordered_json;
  fs::create_directories(dir);
  std::string summary =
      "scene,mode,seed,iterations,diverged,final_l_vf,final_l_pv,final_mean_proxy_dist,"
      "sign_agreement,max_keypoint_error,vote_success,add,add_s,proj2d,add_correct,proj_correct\n";
  for (const RunRecord& run : report.runs) {
    const TrainTrace& tr = run.fit.trace;
    const fs::path run_dir = fs::path(dir) / std::string(to_string(run.mode)) / run.scene /
                             ("seed_" + std::to_string(run.seed));
    write_file_atomic((run_dir / "trace.csv").string(), trace_to_csv(tr));
    write_field_set({run.mask, run.fit.fields}, (run_dir / "fields").string());

    ordered_json js;
    js["scene"] = run.scene;
    js["mode"] = std::string(to_string(run.mode));
    js["seed"] = run.seed;
    js["iterations"] = tr.records.size();
    js["diverged"] = tr.diverged;
    if (tr.diverged) js["failure"] = tr.failure;
    js["final_l_vf"] = ordered_json::parse(json_number(tr.final_l_vf));
    js["final_l_pv"] = ordered_json::parse(json_number(tr.final_l_pv));
    js["final_mean_proxy_dist"] = ordered_json::parse(json_number(tr.final_mean_proxy_dist));
    js["sign_agreement"] = ordered_json::parse(json_number(tr.final_sign_agreement));
    ordered_json kps = ordered_json::array();
    for (std::size_t k = 0; k < tr.keypoint_errors.size(); ++k) {
      kps.push_back({{"index", k},
                     {"u", ordered_json::parse(json_number(tr.voted[k].x))},
                     {"v", ordered_json::parse(json_number(tr.voted[k].y))},
                     {"votes", tr.votes[k]},
                     {"error_px", ordered_json::parse(json_number(tr.keypoint_errors[k]))}});
    }
    js["keypoints"] = kps;
    js["vote_success"] = tr.voting_succeeded();
    if (run.eval) {
      js["add"] = run.eval->add;
      js["add_s"] = run.eval->add_s;
      js["proj2d"] = run.eval->proj2d;
      js["add_correct"] = run.eval->add_correct;
      js["proj_correct"] = run.eval->proj_correct;
    }
    write_file_atomic((run_dir / "summary.json").string(), js.dump(2) + "\n");

    summary += run.scene + "," + std::string(to_string(run.mode)) + "," +
               std::to_string(run.seed) + "," + std::to_string(tr.records.size()) + "," +
               (tr.diverged ? "1" : "0") + "," + format_double(tr.final_l_vf) + "," +
               format_double(tr.final_l_pv) + "," + format_double(tr.final_mean_proxy_dist) +
               "," + format_double(tr.final_sign_agreement) + "," +
               format_double(tr.max_keypoint_error()) + "," +
               (tr.voting_succeeded() ? "1" : "0");
    if (run.eval) {
      summary += "," + format_double(run.eval->add) + "," + format_double(run.eval->add_s) +
                 "," + format_double(run.eval->proj2d) + "," +
                 (run.eval->add_correct ? "1" : "0") + "," +
                 (run.eval->proj_correct ? "1" : "0");
    } else {
      summary += ",,,,,";
    }
    summary += "\n";
  }
  write_file_atomic((fs::path(dir) / "summary.csv").string(), summary);
}

}  // namespace proxyvote
