// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/model.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>

#include "proxyvote/error.hpp"
#include "proxyvote/random.hpp"

namespace proxyvote {

namespace {

[[noreturn]] void parse_error(const std::string& path, std::size_t line,
                              const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line << ": " << what;
  throw Error(ErrorCode::Parse, msg.str());
}

bool parse_double(const std::string& token, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size() && std::isfinite(out);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

std::vector<Point3> read_ply(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") parse_error(path, 1, "missing 'ply' magic");

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;  // "list" for list properties
  };
  std::vector<Element> elements;
  bool ascii = false;
  bool ended = false;
  while (next_line()) {
    const auto tok = tokenize(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) parse_error(path, lineno, "malformed format line");
      if (tok[1] != "ascii") {
        parse_error(path, lineno, "only ASCII PLY is supported, got '" + tok[1] + "'");
      }
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) parse_error(path, lineno, "malformed element line");
      Element e;
      e.name = tok[1];
      try {
        e.count = std::stoul(tok[2]);
      } catch (const std::exception&) {
        parse_error(path, lineno, "bad element count '" + tok[2] + "'");
      }
      elements.push_back(e);
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3) {
        parse_error(path, lineno, "property outside of an element");
      }
      elements.back().properties.push_back(tok[1] == "list" ? "list" : tok.back());
    } else if (tok[0] == "end_header") {
      ended = true;
      break;
    } else {
      parse_error(path, lineno, "unexpected header line '" + line + "'");
    }
  }
  if (!ended) parse_error(path, lineno, "missing end_header");
  if (!ascii) parse_error(path, lineno, "missing format line");

  std::vector<Point3> points;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!next_line()) parse_error(path, lineno + 1, "unexpected end of file");
      }
      continue;
    }
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      const std::string& name = e.properties[p];
      if (name == "list") parse_error(path, lineno, "list property on vertex element");
      if (name == "x") ix = static_cast<int>(p);
      if (name == "y") iy = static_cast<int>(p);
      if (name == "z") iz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) {
      parse_error(path, lineno, "vertex element lacks x/y/z properties");
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line()) parse_error(path, lineno + 1, "unexpected end of file");
      const auto tok = tokenize(line);
      if (tok.size() < e.properties.size()) {
        parse_error(path, lineno, "vertex line has too few values");
      }
      Point3 X;
      if (!parse_double(tok[ix], X.x) || !parse_double(tok[iy], X.y) ||
          !parse_double(tok[iz], X.z)) {
        parse_error(path, lineno, "non-numeric vertex coordinate");
      }
      points.push_back(X);
    }
  }
  return points;
}

std::vector<Point3> read_obj(std::istream& in, const std::string& path) {
  std::vector<Point3> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = tokenize(line);
    if (tok.empty() || tok[0] != "v") continue;
    if (tok.size() < 4) parse_error(path, lineno, "vertex record needs 3 coordinates");
    Point3 X;
    if (!parse_double(tok[1], X.x) || !parse_double(tok[2], X.y) ||
        !parse_double(tok[3], X.z)) {
      parse_error(path, lineno, "non-numeric vertex coordinate");
    }
    points.push_back(X);
  }
  return points;
}

double max_pairwise(std::span<const Point3> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eigen::Vector3d a = pts[i].vec();
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      best = std::max(best, (a - pts[j].vec()).squaredNorm());
    }
  }
  return std::sqrt(best);
}

}  // namespace

ModelCloud load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open model file " + path);
  const std::filesystem::path fs_path(path);
  std::string ext = fs_path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  ModelCloud cloud;
  cloud.name = fs_path.stem().string();
  if (ext == ".ply") {
    cloud.points = read_ply(in, path);
  } else if (ext == ".obj") {
    cloud.points = read_obj(in, path);
  } else {
    throw Error(ErrorCode::Parse, path + ": unsupported model extension '" + ext + "'");
  }
  if (cloud.points.size() < kMinModelPoints) {
    std::ostringstream msg;
    msg << path << ": model has " << cloud.points.size()
        << " vertices, need at least " << kMinModelPoints;
    throw Error(ErrorCode::TooFewPoints, msg.str());
  }
  return cloud;
}

std::size_t farthest_from_centroid(const ModelCloud& cloud) {
  if (cloud.points.empty()) throw Error(ErrorCode::TooFewPoints, "empty cloud");
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const Point3& p : cloud.points) c += p.vec();
  c /= static_cast<double>(cloud.points.size());
  std::size_t best = 0;
  double best_d = -1.0;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const double d = (cloud.points[i].vec() - c).squaredNorm();
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

KeypointSet farthest_point_sampling(const ModelCloud& cloud, std::size_t n,
                                    std::optional<std::size_t> start) {
  const std::size_t total = cloud.points.size();
  if (n > total) {
    std::ostringstream msg;
    msg << "farthest_point_sampling: requested " << n << " of " << total << " points";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  KeypointSet out;
  if (n == 0) return out;
  const std::size_t first = start.value_or(farthest_from_centroid(cloud));
  if (first >= total) {
    throw Error(ErrorCode::InvalidArgument, "farthest_point_sampling: start out of range");
  }

  std::vector<double> nearest(total, std::numeric_limits<double>::infinity());
  std::size_t pick = first;
  double pick_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    out.points3.push_back(cloud.points[pick]);
    out.source_indices.push_back(pick);
    out.min_distances.push_back(pick_d);
    const Eigen::Vector3d chosen = cloud.points[pick].vec();
    for (std::size_t i = 0; i < total; ++i) {
      nearest[i] = std::min(nearest[i], (cloud.points[i].vec() - chosen).norm());
    }
    pick_d = -1.0;
    for (std::size_t i = 0; i < total; ++i) {
      if (nearest[i] > pick_d) {
        pick_d = nearest[i];
        pick = i;
      }
    }
  }
  return out;
}

double model_diameter(const ModelCloud& cloud) {
  if (cloud.points.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "model_diameter needs at least 2 points");
  }
  if (cloud.points.size() <= kDiameterExactLimit) return max_pairwise(cloud.points);

  // Partial Fisher-Yates with a fixed seed.
  std::vector<std::size_t> order(cloud.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(0, "diameter"));
  std::vector<Point3> sample;
  sample.reserve(kDiameterExactLimit);
  for (std::size_t i = 0; i < kDiameterExactLimit; ++i) {
    const std::size_t j = i + rng.index(order.size() - i);
    std::swap(order[i], order[j]);
    sample.push_back(cloud.points[order[i]]);
  }
  return max_pairwise(sample);
}

ModelCloud make_box_cloud(double sx, double sy, double sz, int per_edge,
                          std::string name) {
  if (per_edge < 2) throw Error(ErrorCode::InvalidArgument, "make_box_cloud: per_edge < 2");
  ModelCloud cloud;
  cloud.name = std::move(name);
  const int last = per_edge - 1;
  auto coord = [&](int i, double s) { return -0.5 * s + s * i / last; };
  for (int i = 0; i <= last; ++i) {
    for (int j = 0; j <= last; ++j) {
      for (int k = 0; k <= last; ++k) {
        const bool surface = i == 0 || i == last || j == 0 || j == last ||
                             k == 0 || k == last;
        if (surface) cloud.points.push_back({coord(i, sx), coord(j, sy), coord(k, sz)});
      }
    }
  }
  return cloud;
}

}  // namespace proxyvote
