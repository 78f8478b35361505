// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "proxyvote/error.hpp"

namespace proxyvote {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string field_file(std::size_t i) { return "field_" + std::to_string(i) + ".csv"; }

[[noreturn]] void parse_error(const std::string& source, std::size_t line,
                              const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw Error(ErrorCode::Parse, msg.str());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

bool to_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool to_int(const std::string& s, long long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double finite_number(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::Parse, source + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

void write_file_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename into " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string mask_to_pgm(const Mask& mask) {
  std::string out = "P2\n" + std::to_string(mask.width()) + " " +
                    std::to_string(mask.height()) + "\n1\n";
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (c > 0) out += ' ';
      out += mask.at(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

Mask mask_from_pgm(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string magic;
  long long w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P2" || w <= 0 || h <= 0 || maxval <= 0) {
    throw Error(ErrorCode::Parse, source + ": bad P2 header");
  }
  Mask mask(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < mask.size(); ++i) {
    long long v = 0;
    if (!(in >> v) || v < 0 || v > maxval) {
      throw Error(ErrorCode::Parse, source + ": bad or missing pixel value");
    }
    mask[i] = v > 0 ? 1 : 0;
  }
  return mask;
}

std::string field_to_csv(const VectorField& field, const Mask& mask) {
  std::string out = "row,col,vx,vy\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!mask.contains(i)) continue;
    out += std::to_string(field.row_of(i)) + "," + std::to_string(field.col_of(i)) +
           "," + format_double(field[i].vx) + "," + format_double(field[i].vy) + "\n";
  }
  return out;
}

VectorField field_from_csv(const std::string& text, int width, int height,
                           const std::string& source) {
  VectorField field(width, height);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "row,col,vx,vy") parse_error(source, lineno, "unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    long long r = 0, c = 0;
    Direction2 v;
    if (cells.size() != 4 || !to_int(cells[0], r) || !to_int(cells[1], c) ||
        !to_double(cells[2], v.vx) || !to_double(cells[3], v.vy)) {
      parse_error(source, lineno, "malformed record");
    }
    if (!std::isfinite(v.vx) || !std::isfinite(v.vy)) {
      parse_error(source, lineno, "non-finite direction value");
    }
    if (r < 0 || c < 0 || r >= height || c >= width) {
      parse_error(source, lineno, "pixel outside the image");
    }
    field.at(static_cast<int>(r), static_cast<int>(c)) = v;
  }
  return field;
}

void write_field_set(const FieldSet& set, const std::string& dir) {
  fs::create_directories(dir);
  write_file_atomic((fs::path(dir) / "mask.pgm").string(), mask_to_pgm(set.mask));
  for (std::size_t i = 0; i < set.fields.size(); ++i) {
    write_file_atomic((fs::path(dir) / field_file(i)).string(),
                      field_to_csv(set.fields[i], set.mask));
  }
}

FieldSet read_field_set(const std::string& dir) {
  const fs::path base(dir);
  FieldSet set;
  const std::string mask_path = (base / "mask.pgm").string();
  set.mask = mask_from_pgm(read_file(mask_path), mask_path);
  for (std::size_t i = 0;; ++i) {
    const fs::path p = base / field_file(i);
    if (!fs::exists(p)) break;
    set.fields.push_back(field_from_csv(read_file(p.string()), set.mask.width(),
                                        set.mask.height(), p.string()));
  }
  if (set.fields.empty()) {
    throw Error(ErrorCode::Io, dir + ": no field_<i>.csv files");
  }
  return set;
}

void write_scene(const SceneSample& s, const std::string& dir) {
  const fs::path base(dir);
  fs::create_directories(base);
  json pose;
  std::vector<double> rot;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(s.pose.rotation(r, c));
  }
  pose["rotation"] = rot;
  pose["translation"] = {s.pose.translation.x(), s.pose.translation.y(),
                         s.pose.translation.z()};
  pose["fx"] = s.intr.fx;
  pose["fy"] = s.intr.fy;
  pose["cx"] = s.intr.cx;
  pose["cy"] = s.intr.cy;
  pose["width"] = s.width;
  pose["height"] = s.height;
  pose["num_keypoints"] = s.keypoints2.size();
  write_file_atomic((base / "pose.json").string(), pose.dump(2) + "\n");

  std::string kp = "index,u,v,x,y,z\n";
  for (std::size_t i = 0; i < s.keypoints2.size(); ++i) {
    const Point2 k = s.keypoints2[i];
    const Point3 K = s.keypoints3[i];
    kp += std::to_string(i) + "," + format_double(k.x) + "," + format_double(k.y) + "," +
          format_double(K.x) + "," + format_double(K.y) + "," + format_double(K.z) + "\n";
  }
  write_file_atomic((base / "keypoints.csv").string(), kp);
  write_field_set({s.mask, s.gt_fields}, dir);
}

SceneSample read_scene(const std::string& dir) {
  const fs::path base(dir);
  const std::string pose_path = (base / "pose.json").string();
  json pose;
  try {
    pose = json::parse(read_file(pose_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, pose_path + ": " + e.what());
  }
  if (!pose.is_object() || !pose.contains("rotation") || !pose.contains("translation")) {
    throw Error(ErrorCode::Parse, pose_path + ": missing rotation or translation");
  }
  SceneSample s;
  const auto& rot = pose.at("rotation");
  const auto& tr = pose.at("translation");
  if (!rot.is_array() || rot.size() != 9 || !tr.is_array() || tr.size() != 3) {
    throw Error(ErrorCode::Parse, pose_path + ": rotation needs 9 and translation 3 numbers");
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!rot.at(3 * r + c).is_number()) {
        throw Error(ErrorCode::Parse, pose_path + ": non-numeric rotation entry");
      }
      s.pose.rotation(r, c) = rot.at(3 * r + c).get<double>();
    }
    if (!tr.at(r).is_number()) {
      throw Error(ErrorCode::Parse, pose_path + ": non-numeric translation entry");
    }
    s.pose.translation(r) = tr.at(r).get<double>();
  }
  s.intr = {finite_number(pose, "fx", pose_path), finite_number(pose, "fy", pose_path),
            finite_number(pose, "cx", pose_path), finite_number(pose, "cy", pose_path)};
  s.width = static_cast<int>(finite_number(pose, "width", pose_path));
  s.height = static_cast<int>(finite_number(pose, "height", pose_path));

  const std::string kp_path = (base / "keypoints.csv").string();
  std::istringstream kin(read_file(kp_path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(kin, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    const auto cells = split_csv(line);
    double v[5];
    bool ok = cells.size() == 6;
    for (int j = 0; ok && j < 5; ++j) ok = to_double(cells[j + 1], v[j]) && std::isfinite(v[j]);
    if (!ok) parse_error(kp_path, lineno, "malformed keypoint record");
    s.keypoints2.push_back({v[0], v[1]});
    s.keypoints3.push_back({v[2], v[3], v[4]});
  }

  FieldSet set = read_field_set(dir);
  if (set.mask.width() != s.width || set.mask.height() != s.height) {
    throw Error(ErrorCode::DimensionMismatch, dir + ": mask size disagrees with pose.json");
  }
  if (set.fields.size() != s.keypoints2.size()) {
    throw Error(ErrorCode::Parse, dir + ": field count does not match keypoints.csv");
  }
  s.mask = std::move(set.mask);
  s.gt_fields = std::move(set.fields);
  for (const VectorField& f : s.gt_fields) {
    std::size_t zero = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (s.mask.contains(i) && f[i].norm() == 0.0) ++zero;
    }
    s.degenerate_pixels.push_back(zero);
  }
  return s;
}

}  // namespace proxyvote
