// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

// Runs the proxyvote executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = PROXYVOTE_CLI_PATH;
const std::string kModel = std::string(PROXYVOTE_DATA_DIR) + "/box.ply";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("proxyvote_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Result run(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

/// Relative path -> contents for every file under `dir` except manifest.json.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

fs::path generate(const std::string& name, const std::string& extra = "") {
  const fs::path d = fresh(name);
  const Result r = run("gen --model " + kModel + " --n 10 --seed 1 --out " +
                           (d / "scenes").string() + " " + extra,
                       d);
  EXPECT_EQ(r.code, 0) << r.err;
  return d;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  const fs::path d = fresh("usage");
  EXPECT_EQ(run("", d).code, 2);
  EXPECT_EQ(run("frobnicate", d).code, 2);
  EXPECT_EQ(run("gen --model " + kModel + " --n 0 --out " + (d / "x").string(), d).code, 2);
  EXPECT_EQ(run("gen --bogus-flag", d).code, 2);
  const Result r = run("train --scenes " + d.string() + " --mode both --out " +
                           (d / "t").string(),
                       d);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("both"), std::string::npos) << r.err;
}

TEST(Cli, RuntimeErrorsExitOne) {
  const fs::path d = fresh("runtime");
  const Result r = run("gen --model /nonexistent/m.ply --n 2 --out " + (d / "x").string(), d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/nonexistent/m.ply"), std::string::npos) << r.err;
}

TEST(Cli, GenWritesScenesAndManifest) {
  const fs::path d = generate("gen");
  std::size_t scenes = 0;
  for (const auto& e : fs::directory_iterator(d / "scenes")) {
    if (e.is_directory()) {
      ++scenes;
      EXPECT_TRUE(fs::exists(e.path() / "pose.json"));
      EXPECT_TRUE(fs::exists(e.path() / "mask.pgm"));
      EXPECT_TRUE(fs::exists(e.path() / "field_7.csv"));
    }
  }
  EXPECT_EQ(scenes, 10u);
  const auto m = nlohmann::json::parse(slurp(d / "scenes" / "manifest.json"));
  EXPECT_EQ(m.at("command"), "gen");
  EXPECT_TRUE(m.contains("version"));
  EXPECT_EQ(m.at("config").at("n"), 10);
  EXPECT_TRUE(m.at("outputs").is_array());
}

TEST(Cli, TrainWritesFullTrace) {
  const fs::path d = fresh("train");
  ASSERT_EQ(run("gen --model " + kModel + " --n 1 --seed 2 --out " + (d / "s").string(), d).code, 0);
  const Result r = run("train --scenes " + (d / "s").string() + " --mode vf_plus_dpvl --out " +
                           (d / "t").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string trace = slurp(d / "t" / "vf_plus_dpvl" / "scene_0000" / "seed_0" / "trace.csv");
  EXPECT_EQ(count_lines(trace), 2001u);
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "iter,l_vf,l_pv,mean_proxy_dist,alpha,beta");
}

TEST(Cli, DpvlOnlyRunsToCompletion) {
  const fs::path d = fresh("dpvl_only");
  ASSERT_EQ(run("gen --model " + kModel + " --n 1 --seed 3 --out " + (d / "s").string(), d).code, 0);
  const Result r = run("train --scenes " + (d / "s").string() +
                           " --mode dpvl_only --iters 300 --out " + (d / "t").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string summary = slurp(d / "t" / "summary.csv");
  EXPECT_EQ(count_lines(summary), 2u);
  EXPECT_NE(summary.find("dpvl_only"), std::string::npos);
}

TEST(Cli, EvalOnExactFieldsIsPerfect) {
  const fs::path d = generate("eval");
  const Result r = run("eval --scenes " + (d / "scenes").string() + " --model " + kModel +
                           " --out " + (d / "e").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = nlohmann::json::parse(slurp(d / "e" / "summary.json"));
  EXPECT_EQ(s.at("scenes"), 10);
  EXPECT_EQ(s.at("pose_failures"), 0);
  EXPECT_EQ(s.at("add_accuracy").get<double>(), 1.0);
  EXPECT_EQ(s.at("proj_accuracy").get<double>(), 1.0);
  EXPECT_FALSE(s.contains("add_s_accuracy"));
  const std::string csv = slurp(d / "e" / "eval.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')).find("add_s"), std::string::npos);
}

TEST(Cli, SymmetricEvalReportsAddS) {
  const fs::path d = generate("eval_sym");
  const Result r = run("eval --scenes " + (d / "scenes").string() + " --model " + kModel +
                           " --symmetric --out " + (d / "e").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = nlohmann::json::parse(slurp(d / "e" / "summary.json"));
  EXPECT_TRUE(s.at("symmetric").get<bool>());
  EXPECT_EQ(s.at("add_s_accuracy").get<double>(), 1.0);
  const std::string csv = slurp(d / "e" / "eval.csv");
  EXPECT_NE(csv.substr(0, csv.find('\n')).find("add_s"), std::string::npos);
}

TEST(Cli, NanFieldNamesFile) {
  const fs::path d = fresh("nan");
  ASSERT_EQ(run("gen --model " + kModel + " --n 1 --seed 4 --noise-deg 2 --out " +
                    (d / "s").string(),
                d)
                .code,
            0);
  const fs::path bad = d / "s" / "scene_0000" / "estimate" / "field_3.csv";
  ASSERT_TRUE(fs::exists(bad));
  std::ofstream(bad, std::ios::app) << "0,0,nan,0\n";
  const Result r = run("vote --scenes " + (d / "s").string() + " --out " + (d / "v").string(), d);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(bad.string()), std::string::npos) << r.err;
}

TEST(Cli, VoteWritesPerKeypointRows) {
  const fs::path d = generate("vote", "--noise-deg 5 --occlusion 0.2");
  const Result r = run("vote --scenes " + (d / "scenes").string() + " --out " +
                           (d / "v").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(d / "v" / "votes.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scene,keypoint,u,v,votes,refined,ok,error_px");
  EXPECT_EQ(count_lines(csv), 1u + 10u * 8u);
}

TEST(Cli, ReportHonorsThreshold) {
  const fs::path d = fresh("report");
  ASSERT_EQ(run("gen --model " + kModel + " --n 1 --seed 5 --out " + (d / "s").string(), d).code, 0);
  ASSERT_EQ(run("train --scenes " + (d / "s").string() +
                    " --mode vf_only --mode vf_plus_dpvl --iters 200 --runs 2 --out " +
                    (d / "t").string(),
                d)
                .code,
            0);
  const Result r = run("report --train-dir " + (d / "t").string() +
                           " --lpv-threshold 0.25 --out " + (d / "r").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = slurp(d / "r" / "table.txt");
  EXPECT_NE(table.find("l_pv threshold: 0.25"), std::string::npos) << table;
  EXPECT_NE(table.find("vf_only"), std::string::npos);
  EXPECT_EQ(count_lines(slurp(d / "r" / "merged.csv")), 201u);
}

TEST(Cli, ManifestReplayIsByteIdentical) {
  const fs::path d = generate("replay", "--noise-deg 3 --flip-prob 0.05");
  const fs::path first = d / "scenes";
  const Result r = run("gen --config " + (first / "manifest.json").string() + " --out " +
                           (d / "again").string(),
                       d);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = tree(first), b = tree(d / "again");
  EXPECT_EQ(a.size(), b.size());
  EXPECT_TRUE(a == b);

  ASSERT_EQ(run("eval --scenes " + first.string() + " --model " + kModel + " --out " +
                    (d / "e1").string(),
                d)
                .code,
            0);
  ASSERT_EQ(run("eval --config " + (d / "e1" / "manifest.json").string() + " --out " +
                    (d / "e2").string(),
                d)
                .code,
            0);
  EXPECT_TRUE(tree(d / "e1") == tree(d / "e2"));
}
