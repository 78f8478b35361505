// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proxyvote/proxyvote.h"

namespace pvcli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, bad config values: exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I/O and pipeline failures: exit 1.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws on a non-OK status, carrying pv_last_error().
void check(pv_status status);

struct ModelDeleter {
  void operator()(pv_model* p) const { pv_model_destroy(p); }
};
struct SceneDeleter {
  void operator()(pv_scene* p) const { pv_scene_destroy(p); }
};
struct FieldsDeleter {
  void operator()(pv_fields* p) const { pv_fields_destroy(p); }
};
struct ExperimentDeleter {
  void operator()(pv_experiment* p) const { pv_experiment_destroy(p); }
};
struct ReportDeleter {
  void operator()(pv_report* p) const { pv_report_destroy(p); }
};
using ModelPtr = std::unique_ptr<pv_model, ModelDeleter>;
using ScenePtr = std::unique_ptr<pv_scene, SceneDeleter>;
using FieldsPtr = std::unique_ptr<pv_fields, FieldsDeleter>;
using ExperimentPtr = std::unique_ptr<pv_experiment, ExperimentDeleter>;
using ReportPtr = std::unique_ptr<pv_report, ReportDeleter>;

ModelPtr load_model(const std::string& path, bool symmetric);
ScenePtr read_scene(const std::string& dir);
FieldsPtr read_fields(const std::string& dir);

/// Effective configuration of one subcommand: built-in defaults, then the
/// `--config` file, then flags given on the command line.
class Params {
 public:
  Params(CLI::App* app, std::string command);

  template <typename T>
  CLI::Option* option(const std::string& flags, const std::string& key, T fallback,
                      const std::string& help) {
    auto store = std::make_shared<T>(fallback);
    defaults_[key] = fallback;
    CLI::Option* opt = app_->add_option(flags, *store, help);
    bindings_.push_back({key, opt, [store] { return json(*store); }});
    return opt;
  }

  CLI::Option* flag(const std::string& flags, const std::string& key, const std::string& help);

  /// String option holding a filesystem path; stored absolute once resolved
  /// so a manifest replays from any working directory.
  CLI::Option* path(const std::string& flags, const std::string& key, const std::string& help);

  /// Merges defaults, config file and explicit flags. Call after parsing.
  void resolve();

  const json& config() const { return config_; }
  const std::string& command() const { return command_; }

  template <typename T>
  T get(const std::string& key) const {
    try {
      return config_.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }

 private:
  struct Binding {
    std::string key;
    CLI::Option* opt;
    std::function<json()> value;
  };

  CLI::App* app_;
  std::string command_;
  std::string config_path_;
  json defaults_ = json::object();
  json config_ = json::object();
  std::vector<Binding> bindings_;
  std::vector<std::string> path_keys_;
};

/// Thread count: hardware concurrency capped by PROXY_VOTE_THREADS.
unsigned thread_budget();

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the
/// first failure by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Sub-directories of `dir` holding a scene (pose.json), sorted by name.
std::vector<std::string> list_scenes(const std::string& dir);

void write_text_atomic(const std::string& path, const std::string& text);
std::string fmt(double v);

/// Writes <out>/manifest.json listing every other file under `out`.
void write_manifest(const Params& params, const std::string& out, const json& seeds,
                    std::chrono::steady_clock::time_point started);

}  // namespace pvcli
