// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli_support.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace pvcli {

void check(pv_status status) {
  if (status == PV_OK) return;
  const std::string msg = pv_last_error();
  if (status == PV_ERR_CONFIG) throw UsageError(msg);
  throw RuntimeFailure(msg.empty() ? pv_status_name(status) : msg);
}

ModelPtr load_model(const std::string& path, bool symmetric) {
  pv_model* raw = nullptr;
  check(pv_model_load(path.c_str(), &raw));
  ModelPtr model(raw);
  check(pv_model_set_symmetric(model.get(), symmetric ? 1 : 0));
  return model;
}

ScenePtr read_scene(const std::string& dir) {
  pv_scene* raw = nullptr;
  check(pv_scene_read(dir.c_str(), &raw));
  return ScenePtr(raw);
}

FieldsPtr read_fields(const std::string& dir) {
  pv_fields* raw = nullptr;
  check(pv_fields_read(dir.c_str(), &raw));
  return FieldsPtr(raw);
}

Params::Params(CLI::App* app, std::string command) : app_(app), command_(std::move(command)) {
  app_->add_option("--config", config_path_,
                   "JSON config, or a manifest.json from an earlier run to replay");
}

CLI::Option* Params::flag(const std::string& flags, const std::string& key,
                          const std::string& help) {
  auto store = std::make_shared<bool>(false);
  defaults_[key] = false;
  CLI::Option* opt = app_->add_flag(flags, *store, help);
  bindings_.push_back({key, opt, [store] { return json(*store); }});
  return opt;
}

CLI::Option* Params::path(const std::string& flags, const std::string& key,
                          const std::string& help) {
  path_keys_.push_back(key);
  return option<std::string>(flags, key, "", help);
}

void Params::resolve() {
  config_ = defaults_;
  if (!config_path_.empty()) {
    std::ifstream in(config_path_, std::ios::binary);
    if (!in) throw RuntimeFailure("cannot open config file " + config_path_);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(config_path_ + ": invalid JSON: " + e.what());
    }
    if (!file.is_object()) throw UsageError(config_path_ + ": expected a JSON object");
    if (file.contains("config") && file.contains("command")) {
      if (file["command"] != command_) {
        throw UsageError(config_path_ + ": manifest is for command '" +
                         file["command"].get<std::string>() + "', not '" + command_ + "'");
      }
      file = file["config"];
    }
    for (const auto& [key, value] : file.items()) {
      if (!defaults_.contains(key)) {
        throw UsageError(config_path_ + ": unknown key '" + key + "' for " + command_);
      }
      if (!defaults_[key].is_null() && !value.is_null() &&
          (defaults_[key].is_number() != value.is_number() ||
           defaults_[key].is_string() != value.is_string() ||
           defaults_[key].is_boolean() != value.is_boolean() ||
           defaults_[key].is_array() != value.is_array())) {
        throw UsageError(config_path_ + ": key '" + key + "' has the wrong type");
      }
      config_[key] = value;
    }
  }
  for (const Binding& b : bindings_) {
    if (b.opt->count() > 0) config_[b.key] = b.value();
  }
  for (const std::string& key : path_keys_) {
    const std::string value = get<std::string>(key);
    if (!value.empty()) config_[key] = fs::absolute(value).lexically_normal().string();
  }
}

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PROXY_VOTE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
      throw UsageError(std::string("PROXY_VOTE_THREADS must be a positive integer, got '") +
                       env + "'");
    }
    n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::string> list_scenes(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw RuntimeFailure("scene directory not found: " + dir);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "pose.json")) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw RuntimeFailure("no scenes found in " + dir);
  return names;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw RuntimeFailure("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw RuntimeFailure("cannot rename into " + path + ": " + ec.message());
}

std::string fmt(double v) {
  char buf[64];
  check(pv_format_double(v, buf, sizeof buf));
  return buf;
}

void write_manifest(const Params& params, const std::string& out, const json& seeds,
                    std::chrono::steady_clock::time_point started) {
  std::vector<std::string> outputs;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), out).generic_string();
    if (rel != "manifest.json") outputs.push_back(rel);
  }
  std::sort(outputs.begin(), outputs.end());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json m;
  m["command"] = params.command();
  m["version"] = pv_version();
  m["config"] = params.config();
  m["seeds"] = seeds;
  m["outputs"] = outputs;
  m["wall_time_s"] = wall;
  write_text_atomic((fs::path(out) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace pvcli
