// Copyright 2026 The reachlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Test-only oracles, kept independent of the library's implementation paths:
// plain 4x4 homogeneous-transform chains for kinematics, central finite
// differences for Jacobians and gradients, SVD-based pseudoinverses, and
// closed-form planar two-link dynamics.

#include <Eigen/SVD>
#include <cmath>
#include <functional>

#include "reachlab/arm_model.hpp"

namespace reachlab::oracles {

using Mat4 = Eigen::Matrix4d;

inline Mat4 translation4(const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 3) = t;
  return m;
}

inline Mat4 rotation4(const Mat3& rot) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = rot;
  return m;
}

inline Mat4 axis_rotation4(const Vec3& axis, double angle) {
  // Rodrigues formula written out, no Eigen AngleAxis involved.
  const Vec3 u = axis.normalized();
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 k;
  k << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  const Mat3 rot = c * Mat3::Identity() + s * k + (1 - c) * (u * u.transpose());
  return rotation4(rot);
}

// World transform of every link frame via explicit 4x4 chains.
inline std::vector<Mat4> fk_transform_chain(const ArmModel& model, const VecX& q) {
  std::vector<Mat4> frames;
  Mat4 world = Mat4::Identity();
  for (int i = 0; i < model.dof(); ++i) {
    const Joint& j = model.joints[i];
    world = world * translation4(j.origin_xyz) * rotation4(j.origin_rot) *
            axis_rotation4(j.axis, q[i]);
    frames.push_back(world);
  }
  return frames;
}

inline Vec3 fk_ee_oracle(const ArmModel& model, const VecX& q) {
  const auto frames = fk_transform_chain(model, q);
  const Mat4& t = frames[size_t(model.end_effector.link)];
  Eigen::Vector4d p;
  p << model.end_effector.offset, 1.0;
  return (t * p).head<3>();
}

// Central-difference position Jacobian.
inline MatX jacobian_fd(const ArmModel& model, const VecX& q, double eps = 1e-6) {
  MatX jac(3, model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    VecX qp = q, qm = q;
    qp[i] += eps;
    qm[i] -= eps;
    jac.col(i) = (fk_ee_oracle(model, qp) - fk_ee_oracle(model, qm)) / (2 * eps);
  }
  return jac;
}

// (J(q + eps qdot) - J(q - eps qdot)) / (2 eps) * qdot.
inline Vec3 jdot_qdot_fd(const ArmModel& model, const VecX& q, const VecX& qdot,
                         double eps = 1e-6) {
  const MatX jp = jacobian(model, q + eps * qdot);
  const MatX jm = jacobian(model, q - eps * qdot);
  return ((jp - jm) / (2 * eps)) * qdot;
}

// SVD pseudoinverse with singular-value threshold.
inline MatX pinv_svd(const MatX& m, double tol = 1e-10) {
  Eigen::JacobiSVD<MatX> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  VecX inv = svd.singularValues();
  for (long i = 0; i < inv.size(); ++i) inv[i] = inv[i] > tol ? 1.0 / inv[i] : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Closed-form planar two-link dynamics with point masses at the link tips.
struct Planar2Closed {
  double m1 = 1.0, m2 = 1.0, l1 = 1.0, l2 = 1.0, g0 = 9.81;

  MatX mass(const VecX& q) const {
    const double c2 = std::cos(q[1]);
    MatX m(2, 2);
    m(0, 0) = m1 * l1 * l1 + m2 * (l1 * l1 + 2 * l1 * l2 * c2 + l2 * l2);
    m(0, 1) = m(1, 0) = m2 * (l2 * l2 + l1 * l2 * c2);
    m(1, 1) = m2 * l2 * l2;
    return m;
  }
  // Gravity along -y in the plane.
  VecX gravity_torque(const VecX& q) const {
    const double c1 = std::cos(q[0]);
    const double c12 = std::cos(q[0] + q[1]);
    VecX g(2);
    g[0] = (m1 + m2) * g0 * l1 * c1 + m2 * g0 * l2 * c12;
    g[1] = m2 * g0 * l2 * c12;
    return g;
  }
  // Christoffel Coriolis matrix.
  MatX coriolis_matrix(const VecX& q, const VecX& qd) const {
    const double h = -m2 * l1 * l2 * std::sin(q[1]);
    MatX c(2, 2);
    c(0, 0) = h * qd[1];
    c(0, 1) = h * (qd[0] + qd[1]);
    c(1, 0) = -h * qd[0];
    c(1, 1) = 0.0;
    return c;
  }
};

// Central-difference gradient of a scalar function of a flat vector.
inline VecX gradient_fd(const std::function<double(const VecX&)>& f, const VecX& x,
                        double eps = 1e-6) {
  VecX g(x.size());
  for (long i = 0; i < x.size(); ++i) {
    VecX xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    g[i] = (f(xp) - f(xm)) / (2 * eps);
  }
  return g;
}

inline double max_rel_error(const VecX& a, const VecX& b, double floor = 1.0) {
  double worst = 0.0;
  for (long i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace reachlab::oracles
