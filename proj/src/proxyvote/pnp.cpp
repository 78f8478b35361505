// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/pnp.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "proxyvote/error.hpp"

namespace proxyvote {

namespace {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

// Object points expressed as barycentric weights of 3 or 4 control points.
struct ControlFrame {
  std::vector<Vector3d> points;  // control points, model frame
  MatrixXd alphas;               // n x points.size()
};

ControlFrame choose_control_points(std::span<const Correspondence> corrs) {
  const auto n = static_cast<double>(corrs.size());
  Vector3d c0 = Vector3d::Zero();
  for (const auto& c : corrs) c0 += c.object_point.vec();
  c0 /= n;
  Matrix3d cov = Matrix3d::Zero();
  for (const auto& c : corrs) {
    const Vector3d d = c.object_point.vec() - c0;
    cov += d * d.transpose();
  }
  cov /= n;
  const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(cov);
  const Vector3d lambda = eig.eigenvalues();  // ascending
  const Matrix3d axes = eig.eigenvectors();
  if (!(lambda(2) > 0.0) || lambda(1) < kPlanarEigenRatio * lambda(2)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "epnp: object points are coincident or collinear");
  }
  const bool planar = lambda(0) < kPlanarEigenRatio * lambda(2);
  const int first_axis = planar ? 1 : 0;

  ControlFrame frame;
  frame.points.push_back(c0);
  std::vector<double> scale;
  std::vector<Vector3d> dirs;
  for (int a = 2; a >= first_axis; --a) {
    const double s = std::sqrt(lambda(a));
    scale.push_back(s);
    dirs.push_back(axes.col(a));
    frame.points.push_back(c0 + s * axes.col(a));
  }
  // Principal axes are orthonormal, so the barycentric weights are plain
  // projections onto them.
  const int nc = static_cast<int>(frame.points.size());
  frame.alphas.resize(static_cast<Eigen::Index>(corrs.size()), nc);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Vector3d d = corrs[i].object_point.vec() - c0;
    double rest = 1.0;
    for (int j = 1; j < nc; ++j) {
      const double a = dirs[j - 1].dot(d) / scale[j - 1];
      frame.alphas(static_cast<Eigen::Index>(i), j) = a;
      rest -= a;
    }
    frame.alphas(static_cast<Eigen::Index>(i), 0) = rest;
  }
  return frame;
}

Vector3d segment(const VectorXd& v, int j) { return v.segment<3>(3 * j); }

struct BetaProblem {
  std::vector<std::pair<int, int>> pairs;  // control point pairs
  std::vector<std::pair<int, int>> monos;  // beta_k * beta_l, k <= l
  MatrixXd L;                              // pairs x monos
  VectorXd rho;                            // squared model-frame distances
  int num_betas = 0;

  VectorXd monomials(const VectorXd& beta) const {
    VectorXd m(static_cast<Eigen::Index>(monos.size()));
    for (std::size_t i = 0; i < monos.size(); ++i) {
      m(static_cast<Eigen::Index>(i)) = beta(monos[i].first) * beta(monos[i].second);
    }
    return m;
  }

  Eigen::Index column(int k, int l) const {
    for (std::size_t i = 0; i < monos.size(); ++i) {
      if (monos[i] == std::pair{k, l}) return static_cast<Eigen::Index>(i);
    }
    return -1;
  }
};

BetaProblem build_beta_problem(const ControlFrame& frame,
                               const std::vector<VectorXd>& null_vectors) {
  BetaProblem bp;
  const int nc = static_cast<int>(frame.points.size());
  bp.num_betas = static_cast<int>(null_vectors.size());
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) bp.pairs.emplace_back(a, b);
  }
  for (int l = 0; l < bp.num_betas; ++l) {
    for (int k = 0; k <= l; ++k) bp.monos.emplace_back(k, l);
  }
  const auto np = static_cast<Eigen::Index>(bp.pairs.size());
  bp.L.resize(np, static_cast<Eigen::Index>(bp.monos.size()));
  bp.rho.resize(np);
  for (Eigen::Index r = 0; r < np; ++r) {
    const auto [a, b] = bp.pairs[static_cast<std::size_t>(r)];
    std::vector<Vector3d> dv;
    for (const VectorXd& v : null_vectors) {
      dv.push_back(segment(v, a) - segment(v, b));
    }
    for (std::size_t m = 0; m < bp.monos.size(); ++m) {
      const auto [k, l] = bp.monos[m];
      const double dot = dv[k].dot(dv[l]);
      bp.L(r, static_cast<Eigen::Index>(m)) = (k == l) ? dot : 2.0 * dot;
    }
    bp.rho(r) = (frame.points[a] - frame.points[b]).squaredNorm();
  }
  return bp;
}

// Single null vector: beta from the ratio of model-frame to null-space
// control point distances.
VectorXd betas_one(const BetaProblem& bp, const std::vector<VectorXd>& nv) {
  VectorXd beta = VectorXd::Zero(bp.num_betas);
  double n2 = 0.0;
  double d2 = 0.0;
  for (std::size_t r = 0; r < bp.pairs.size(); ++r) {
    const auto [a, b] = bp.pairs[r];
    const double dv = (segment(nv[0], a) - segment(nv[0], b)).norm();
    n2 += dv * std::sqrt(bp.rho(static_cast<Eigen::Index>(r)));
    d2 += dv * dv;
  }
  if (d2 > 0.0) beta(0) = n2 / d2;
  return beta;
}

// Linearized solve over the listed monomial columns, then read off betas.
VectorXd betas_linearized(const BetaProblem& bp, int n) {
  std::vector<Eigen::Index> cols = {bp.column(0, 0), bp.column(0, 1),
                                    bp.column(1, 1)};
  if (n == 3) {
    cols.push_back(bp.column(0, 2));
    cols.push_back(bp.column(1, 2));
  }
  MatrixXd Ls(bp.L.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Ls.col(static_cast<Eigen::Index>(c)) = bp.L.col(cols[c]);
  }
  const VectorXd x = Ls.colPivHouseholderQr().solve(bp.rho);
  VectorXd beta = VectorXd::Zero(bp.num_betas);
  if (x(0) < 0.0) {
    beta(0) = std::sqrt(-x(0));
    beta(1) = x(2) < 0.0 ? std::sqrt(-x(2)) : 0.0;
  } else {
    beta(0) = std::sqrt(x(0));
    beta(1) = x(2) > 0.0 ? std::sqrt(x(2)) : 0.0;
  }
  if (x(1) < 0.0) beta(0) = -beta(0);
  if (n == 3 && beta(0) != 0.0) beta(2) = x(3) / beta(0);
  return beta;
}

void gauss_newton(const BetaProblem& bp, VectorXd& beta) {
  const auto np = static_cast<Eigen::Index>(bp.pairs.size());
  for (int it = 0; it < 10; ++it) {
    MatrixXd J = MatrixXd::Zero(np, bp.num_betas);
    for (std::size_t m = 0; m < bp.monos.size(); ++m) {
      const auto [k, l] = bp.monos[m];
      const auto col = static_cast<Eigen::Index>(m);
      J.col(k) += bp.L.col(col) * beta(l);
      J.col(l) += bp.L.col(col) * beta(k);
    }
    const VectorXd r = bp.rho - bp.L * bp.monomials(beta);
    const VectorXd step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) return;
    beta += step;
    if (step.norm() < 1e-15 * (1.0 + beta.norm())) return;
  }
}

// Rigid alignment of model points onto camera points (no scale), with the
// reflection removed via the determinant correction.
Pose align_rigid(std::span<const Correspondence> corrs,
                 const std::vector<Vector3d>& camera_points) {
  const auto n = static_cast<double>(corrs.size());
  Vector3d cw = Vector3d::Zero();
  Vector3d cc = Vector3d::Zero();
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    cw += corrs[i].object_point.vec();
    cc += camera_points[i];
  }
  cw /= n;
  cc /= n;
  Matrix3d H = Matrix3d::Zero();
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    H += (camera_points[i] - cc) * (corrs[i].object_point.vec() - cw).transpose();
  }
  const Eigen::JacobiSVD<Matrix3d> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d D = Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  Pose pose;
  pose.rotation = svd.matrixU() * D * svd.matrixV().transpose();
  pose.translation = cc - pose.rotation * cw;
  return pose;
}

double rmse_or_inf(const Pose& pose, std::span<const Correspondence> corrs,
                   const Intrinsics& intr) {
  if (!pose.rotation.allFinite() || !pose.translation.allFinite()) {
    return std::numeric_limits<double>::infinity();
  }
  try {
    return reprojection_rmse(pose, corrs, intr);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

Matrix3d nearest_rotation(const Matrix3d& m) {
  const Eigen::JacobiSVD<Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d D = Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

Eigen::Matrix3d skew(const Vector3d& w) {
  Matrix3d s;
  s << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return s;
}

}  // namespace

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Matrix3d K = skew(w);
  if (theta < 1e-12) return Matrix3d::Identity() + K;
  return Matrix3d::Identity() + std::sin(theta) / theta * K +
         (1.0 - std::cos(theta)) / (theta * theta) * K * K;
}

double reprojection_rmse(const Pose& pose, std::span<const Correspondence> corrs,
                         const Intrinsics& intr) {
  if (corrs.empty()) {
    throw Error(ErrorCode::TooFewPoints, "reprojection_rmse: no correspondences");
  }
  double sum = 0.0;
  for (const auto& c : corrs) {
    const Point2 q = project(pose, intr, c.object_point);
    const double dx = q.x - c.image_point.x;
    const double dy = q.y - c.image_point.y;
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum / static_cast<double>(corrs.size()));
}

Pose solve_epnp(std::span<const Correspondence> corrs, const Intrinsics& intr) {
  if (corrs.size() < 4) {
    std::ostringstream msg;
    msg << "epnp needs at least 4 correspondences, got " << corrs.size();
    throw Error(ErrorCode::TooFewPoints, msg.str());
  }
  if (!intr.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "epnp: focal lengths must be positive");
  }
  const ControlFrame frame = choose_control_points(corrs);
  const int nc = static_cast<int>(frame.points.size());
  const auto n = static_cast<Eigen::Index>(corrs.size());

  MatrixXd M = MatrixXd::Zero(2 * n, 3 * nc);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 uv = corrs[static_cast<std::size_t>(i)].image_point;
    for (int j = 0; j < nc; ++j) {
      const double a = frame.alphas(i, j);
      M(2 * i, 3 * j) = a * intr.fx;
      M(2 * i, 3 * j + 2) = a * (intr.cx - uv.x);
      M(2 * i + 1, 3 * j + 1) = a * intr.fy;
      M(2 * i + 1, 3 * j + 2) = a * (intr.cy - uv.y);
    }
  }
  const MatrixXd MtM = M.transpose() * M;
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(MtM);
  const int num_null = nc == 4 ? 4 : 3;
  std::vector<VectorXd> null_vectors;
  for (int k = 0; k < num_null; ++k) null_vectors.push_back(eig.eigenvectors().col(k));

  const BetaProblem bp = build_beta_problem(frame, null_vectors);
  std::vector<VectorXd> candidates = {betas_one(bp, null_vectors),
                                      betas_linearized(bp, 2)};
  if (nc == 4) candidates.push_back(betas_linearized(bp, 3));

  Pose best;
  double best_err = std::numeric_limits<double>::infinity();
  for (VectorXd beta : candidates) {
    gauss_newton(bp, beta);
    if (!beta.allFinite()) continue;
    VectorXd cc = VectorXd::Zero(3 * nc);
    for (int k = 0; k < num_null; ++k) cc += beta(k) * null_vectors[k];
    std::vector<Vector3d> camera_points(corrs.size());
    double z_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector3d pc = Vector3d::Zero();
      for (int j = 0; j < nc; ++j) pc += frame.alphas(i, j) * segment(cc, j);
      camera_points[static_cast<std::size_t>(i)] = pc;
      z_sum += pc.z();
    }
    if (z_sum < 0.0) {
      for (Vector3d& pc : camera_points) pc = -pc;
    }
    const Pose pose = align_rigid(corrs, camera_points);
    const double err = rmse_or_inf(pose, corrs, intr);
    if (err < best_err) {
      best_err = err;
      best = pose;
    }
  }
  if (!std::isfinite(best_err)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "epnp: no candidate pose places all points in front of the camera");
  }
  return best;
}

PoseRefinement refine_pose_with_history(const Pose& init,
                                        std::span<const Correspondence> corrs,
                                        const Intrinsics& intr, int iters) {
  PoseRefinement out{init, {}};
  double current = rmse_or_inf(init, corrs, intr);
  out.rmse_history.push_back(current);
  if (iters <= 0 || !std::isfinite(current)) return out;

  const auto n = static_cast<Eigen::Index>(corrs.size());
  double lambda = 1e-3;
  for (int it = 0; it < iters; ++it) {
    MatrixXd J(2 * n, 6);
    VectorXd r(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& c = corrs[static_cast<std::size_t>(i)];
      const Vector3d rx = out.pose.rotation * c.object_point.vec();
      const Vector3d pc = rx + out.pose.translation;
      const double iz = 1.0 / pc.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << intr.fx * iz, 0.0, -intr.fx * pc.x() * iz * iz,
          0.0, intr.fy * iz, -intr.fy * pc.y() * iz * iz;
      // Left perturbation R <- exp(w) R: dpc/dw = -[R X]x, dpc/dt = I.
      J.block<2, 3>(2 * i, 0) = dproj * (-skew(rx));
      J.block<2, 3>(2 * i, 3) = dproj;
      r(2 * i) = intr.fx * pc.x() * iz + intr.cx - c.image_point.x;
      r(2 * i + 1) = intr.fy * pc.y() * iz + intr.cy - c.image_point.y;
    }
    const Eigen::Matrix<double, 6, 6> H = J.transpose() * J;
    const Eigen::Matrix<double, 6, 1> g = J.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::Matrix<double, 6, 6> A = H;
      for (int d = 0; d < 6; ++d) A(d, d) += lambda * (H(d, d) + 1e-12);
      const Eigen::Matrix<double, 6, 1> step = A.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Pose cand;
      cand.rotation = nearest_rotation(rotation_from_axis_angle(step.head<3>()) *
                                       out.pose.rotation);
      cand.translation = out.pose.translation + step.tail<3>();
      const double err = rmse_or_inf(cand, corrs, intr);
      if (err < current) {
        out.pose = cand;
        current = err;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    out.rmse_history.push_back(current);
    if (!improved) break;
  }
  return out;
}

Pose refine_pose(const Pose& init, std::span<const Correspondence> corrs,
                 const Intrinsics& intr, int iters) {
  return refine_pose_with_history(init, corrs, intr, iters).pose;
}

}  // namespace proxyvote
