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

#include "reachlab/arm_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "reachlab/text_format.hpp"

namespace reachlab {
namespace {

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

Mat3 rpy_to_rot(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy[2], Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy[1], Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy[0], Vec3::UnitX()))
      .toRotationMatrix();
}

// Per-link world-frame velocity/acceleration propagation shared by the
// Newton-Euler pass and the point-velocity queries.
struct ChainMotion {
  LinkFrames frames;
  std::vector<Vec3> axis_world;   // joint axis z_i
  std::vector<Vec3> omega;        // link angular velocity
  std::vector<Vec3> vel;          // linear velocity of the link origin
  std::vector<Vec3> alpha;        // link angular acceleration
  std::vector<Vec3> acc;          // linear acceleration of the link origin
};

ChainMotion propagate(const ArmModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, const Vec3& base_acc) {
  const int n = model.dof();
  ChainMotion m;
  m.frames.rotation.resize(n);
  m.frames.position.resize(n);
  m.axis_world.resize(n);
  m.omega.resize(n);
  m.vel.resize(n);
  m.alpha.resize(n);
  m.acc.resize(n);

  Mat3 rot_p = Mat3::Identity();
  Vec3 pos_p = Vec3::Zero();
  Vec3 omega_p = Vec3::Zero();
  Vec3 vel_p = Vec3::Zero();
  Vec3 alpha_p = Vec3::Zero();
  Vec3 acc_p = base_acc;

  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    const Mat3 pre = rot_p * j.origin_rot;
    const Vec3 pos = pos_p + rot_p * j.origin_xyz;
    const Mat3 rot = pre * axis_angle(j.axis, q[i]);
    const Vec3 z = pre * j.axis;
    const Vec3 d = pos - pos_p;

    m.frames.rotation[i] = rot;
    m.frames.position[i] = pos;
    m.axis_world[i] = z;
    m.omega[i] = omega_p + z * qdot[i];
    m.vel[i] = vel_p + omega_p.cross(d);
    m.alpha[i] = alpha_p + z * qddot[i] + omega_p.cross(z * qdot[i]);
    m.acc[i] = acc_p + alpha_p.cross(d) + omega_p.cross(omega_p.cross(d));

    rot_p = rot;
    pos_p = pos;
    omega_p = m.omega[i];
    vel_p = m.vel[i];
    alpha_p = m.alpha[i];
    acc_p = m.acc[i];
  }
  return m;
}

}  // namespace

VecX ArmModel::lower_limits() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints[i].limit_lower;
  return v;
}

VecX ArmModel::upper_limits() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints[i].limit_upper;
  return v;
}

VecX ArmModel::velocity_limits() const {
  VecX v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints[i].velocity_limit;
  return v;
}

VecX ArmModel::clamp_to_limits(const VecX& q) const {
  VecX out = q;
  for (int i = 0; i < dof(); ++i)
    out[i] = std::clamp(q[i], joints[i].limit_lower, joints[i].limit_upper);
  return out;
}

double ArmModel::max_reach() const {
  double reach = 0.0;
  for (const auto& j : joints) reach += j.origin_xyz.norm();
  reach += end_effector.offset.norm();
  return reach;
}

void validate_model(const ArmModel& model) {
  const int n = model.dof();
  check_arg(n >= 1, "model needs at least one joint");
  check_arg(static_cast<int>(model.links.size()) == n,
            "model needs exactly one link per joint");
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    check_arg(j.parent == i - 1,
              "joint " + std::to_string(i) +
                  ": parent must be the previous joint (a single chain rooted "
                  "at the base); got parent " +
                  std::to_string(j.parent));
    check_arg(std::abs(j.axis.norm() - 1.0) < 1e-9,
              "joint " + std::to_string(i) + ": axis must be a unit vector");
    check_arg(j.limit_lower < j.limit_upper,
              "joint " + std::to_string(i) + ": lower limit must be < upper limit");
    check_arg(j.velocity_limit > 0,
              "joint " + std::to_string(i) + ": velocity limit must be positive");
    const Link& l = model.links[i];
    check_arg(l.mass > 0, "link " + std::to_string(i) + ": mass must be positive");
    check_arg((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() < 1e-9,
              "link " + std::to_string(i) + ": inertia must be symmetric");
    // Point-mass links (zero rotational inertia) are allowed, so require
    // positive semi-definite rather than strictly definite.
    Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
    check_arg(es.eigenvalues().minCoeff() > -1e-12,
              "link " + std::to_string(i) + ": inertia must be positive semi-definite");
  }
  for (const auto& s : model.collision_spheres) {
    check_arg(s.link >= 0 && s.link < n, "collision sphere references unknown link");
    check_arg(s.radius > 0, "collision sphere radius must be positive");
  }
  check_arg(model.end_effector.link >= 0 && model.end_effector.link < n,
            "end effector references unknown link");
}

ArmModel parse_model(const std::string& text, const std::string& source_name) {
  const TextNode root = parse_text_document(text, source_name, "reachlab-model");
  ArmModel model;
  model.name = root.str_or("model", "unnamed");
  model.gravity = root.vec3_or("gravity", Vec3(0, 0, -9.81));

  auto joints = root.find_all("joint");
  auto links = root.find_all("link");
  check(!joints.empty(), ErrorCode::kParse, source_name + ": no joints defined");
  check(joints.size() == links.size(), ErrorCode::kParse,
        source_name + ": joint and link counts differ");

  model.joints.resize(joints.size());
  model.links.resize(links.size());
  for (const TextNode* jn : joints) {
    const long idx = jn->as_int();
    if (idx < 0 || idx >= static_cast<long>(joints.size()))
      jn->error("joint index out of range");
    Joint j;
    j.parent = static_cast<int>(jn->int_or("parent", idx - 1));
    j.origin_xyz = jn->vec3_or("origin_xyz", Vec3::Zero());
    j.origin_rot = rpy_to_rot(jn->vec3_or("origin_rpy", Vec3::Zero()));
    j.axis = jn->vec3("axis");
    if (j.axis.norm() > 0) j.axis.normalize();
    const TextNode& lim = jn->require("limits");
    j.limit_lower = lim.as_num(0);
    j.limit_upper = lim.as_num(1);
    j.velocity_limit = jn->num_or("velocity_limit", 1e9);
    model.joints[idx] = j;
  }
  for (const TextNode* ln : links) {
    const long idx = ln->as_int();
    if (idx < 0 || idx >= static_cast<long>(links.size()))
      ln->error("link index out of range");
    Link l;
    l.mass = ln->num("mass");
    l.com = ln->vec3_or("com", Vec3::Zero());
    const TextNode& in = ln->require("inertia");  // ixx iyy izz ixy ixz iyz
    if (in.values.size() != 6) in.error("inertia needs 6 numbers (ixx iyy izz ixy ixz iyz)");
    l.inertia << in.as_num(0), in.as_num(3), in.as_num(4),
                 in.as_num(3), in.as_num(1), in.as_num(5),
                 in.as_num(4), in.as_num(5), in.as_num(2);
    model.links[idx] = l;
  }
  for (const TextNode* sn : root.find_all("sphere")) {
    CollisionSphere s;
    s.link = static_cast<int>(sn->integer("link"));
    s.offset = sn->vec3_or("offset", Vec3::Zero());
    s.radius = sn->num("radius");
    model.collision_spheres.push_back(s);
  }
  const TextNode& ee = root.require("end_effector");
  model.end_effector.link = static_cast<int>(ee.integer("link"));
  model.end_effector.offset = ee.vec3_or("offset", Vec3::Zero());

  validate_model(model);
  return model;
}

ArmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

LinkFrames forward_kinematics_frames(const ArmModel& model, const VecX& q) {
  check_arg(q.size() == model.dof(), "q has wrong dimension");
  const int n = model.dof();
  LinkFrames f;
  f.rotation.resize(n);
  f.position.resize(n);
  Mat3 rot = Mat3::Identity();
  Vec3 pos = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Joint& j = model.joints[i];
    pos += rot * j.origin_xyz;
    rot = rot * j.origin_rot * axis_angle(j.axis, q[i]);
    f.rotation[i] = rot;
    f.position[i] = pos;
  }
  return f;
}

Vec3 ee_position(const ArmModel& model, const LinkFrames& frames) {
  const EndEffector& ee = model.end_effector;
  return frames.position[ee.link] + frames.rotation[ee.link] * ee.offset;
}

Vec3 ee_position(const ArmModel& model, const VecX& q) {
  return ee_position(model, forward_kinematics_frames(model, q));
}

EePose ee_pose(const ArmModel& model, const VecX& q, const VecX& qdot) {
  EePose pose;
  pose.position = ee_position(model, q);
  pose.linear_velocity = jacobian(model, q) * qdot;
  return pose;
}

MatX jacobian(const ArmModel& model, const VecX& q) {
  check_arg(q.size() == model.dof(), "q has wrong dimension");
  const LinkFrames f = forward_kinematics_frames(model, q);
  const Vec3 x = ee_position(model, f);
  MatX jac = MatX::Zero(3, model.dof());
  Mat3 rot_p = Mat3::Identity();
  for (int i = 0; i <= model.end_effector.link; ++i) {
    const Vec3 z = rot_p * model.joints[i].origin_rot * model.joints[i].axis;
    jac.col(i) = z.cross(x - f.position[i]);
    rot_p = f.rotation[i];
  }
  return jac;
}

Vec3 jdot_qdot(const ArmModel& model, const VecX& q, const VecX& qdot) {
  check_arg(q.size() == model.dof() && qdot.size() == model.dof(),
            "q/qdot have wrong dimension");
  const ChainMotion m =
      propagate(model, q, qdot, VecX::Zero(model.dof()), Vec3::Zero());
  const int e = model.end_effector.link;
  const Vec3 r = m.frames.rotation[e] * model.end_effector.offset;
  return m.acc[e] + m.alpha[e].cross(r) + m.omega[e].cross(m.omega[e].cross(r));
}

std::vector<SphereState> link_sphere_centers(const ArmModel& model, const VecX& q) {
  const LinkFrames f = forward_kinematics_frames(model, q);
  std::vector<SphereState> out;
  out.reserve(model.collision_spheres.size());
  for (const auto& s : model.collision_spheres) {
    SphereState st;
    st.link = s.link;
    st.center = f.position[s.link] + f.rotation[s.link] * s.offset;
    st.radius = s.radius;
    out.push_back(st);
  }
  return out;
}

std::vector<SphereState> link_sphere_states(const ArmModel& model, const VecX& q,
                                            const VecX& qdot) {
  const ChainMotion m =
      propagate(model, q, qdot, VecX::Zero(model.dof()), Vec3::Zero());
  std::vector<SphereState> out;
  out.reserve(model.collision_spheres.size());
  for (const auto& s : model.collision_spheres) {
    SphereState st;
    st.link = s.link;
    const Vec3 r = m.frames.rotation[s.link] * s.offset;
    st.center = m.frames.position[s.link] + r;
    st.radius = s.radius;
    st.velocity = m.vel[s.link] + m.omega[s.link].cross(r);
    out.push_back(st);
  }
  return out;
}

VecX inverse_dynamics(const ArmModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, bool with_gravity) {
  const int n = model.dof();
  check_arg(q.size() == n && qdot.size() == n && qddot.size() == n,
            "q/qdot/qddot have wrong dimension");
  // Gravity enters as a fictitious base acceleration of -g.
  const Vec3 base_acc = with_gravity ? Vec3(-model.gravity) : Vec3::Zero();
  const ChainMotion m = propagate(model, q, qdot, qddot, base_acc);

  VecX tau(n);
  Vec3 f_child = Vec3::Zero();
  Vec3 n_child = Vec3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Link& link = model.links[i];
    const Vec3 rc = m.frames.rotation[i] * link.com;  // joint origin -> COM
    const Vec3 acc_com =
        m.acc[i] + m.alpha[i].cross(rc) + m.omega[i].cross(m.omega[i].cross(rc));
    const Mat3 inertia_w =
        m.frames.rotation[i] * link.inertia * m.frames.rotation[i].transpose();
    const Vec3 force = link.mass * acc_com;
    const Vec3 moment = inertia_w * m.alpha[i] + m.omega[i].cross(inertia_w * m.omega[i]);

    Vec3 f_i = force + f_child;
    Vec3 n_i = moment + rc.cross(force) + n_child;
    if (i + 1 < n)
      n_i += (m.frames.position[i + 1] - m.frames.position[i]).cross(f_child);

    tau[i] = m.axis_world[i].dot(n_i);
    f_child = f_i;
    n_child = n_i;
  }
  return tau;
}

MatX mass_matrix(const ArmModel& model, const VecX& q) {
  const int n = model.dof();
  check_arg(q.size() == n, "q has wrong dimension");
  const LinkFrames f = forward_kinematics_frames(model, q);

  std::vector<Vec3> axis_world(n), com_world(n);
  std::vector<Mat3> inertia_world(n);
  Mat3 rot_p = Mat3::Identity();
  for (int i = 0; i < n; ++i) {
    axis_world[i] = rot_p * model.joints[i].origin_rot * model.joints[i].axis;
    com_world[i] = f.position[i] + f.rotation[i] * model.links[i].com;
    inertia_world[i] = f.rotation[i] * model.links[i].inertia * f.rotation[i].transpose();
    rot_p = f.rotation[i];
  }

  auto shift = [](double mass, const Vec3& r) -> Mat3 {
    return mass * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
  };

  // Composite body i = links i..n-1, accumulated tip-to-base.
  MatX inertia = MatX::Zero(n, n);
  double mass_c = 0.0;
  Vec3 com_c = Vec3::Zero();
  Mat3 inertia_c = Mat3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const double mass_i = model.links[i].mass;
    const double mass_new = mass_c + mass_i;
    const Vec3 com_new = (mass_i * com_world[i] + mass_c * com_c) / mass_new;
    inertia_c = inertia_world[i] + shift(mass_i, com_world[i] - com_new) +
                inertia_c + shift(mass_c, com_c - com_new);
    mass_c = mass_new;
    com_c = com_new;

    // Wrench produced by a unit acceleration of joint i on composite body i.
    const Vec3 force = mass_c * axis_world[i].cross(com_c - f.position[i]);
    const Vec3 moment = inertia_c * axis_world[i] + (com_c - f.position[i]).cross(force);
    for (int j = i; j >= 0; --j) {
      inertia(j, i) = axis_world[j].dot(
          moment + (f.position[i] - f.position[j]).cross(force));
      inertia(i, j) = inertia(j, i);
    }
  }
  return inertia;
}

BiasForces bias_forces(const ArmModel& model, const VecX& q, const VecX& qdot) {
  const VecX zero = VecX::Zero(model.dof());
  BiasForces out;
  out.gravity = inverse_dynamics(model, q, zero, zero, true);
  out.coriolis = inverse_dynamics(model, q, qdot, zero, false);
  return out;
}

VecX coriolis_matrix_times(const ArmModel& model, const VecX& q, const VecX& qdot,
                           const VecX& v) {
  // c(w) = C(q, w) w is a quadratic form whose symmetric bilinear extension
  // is unique, so C(q, qdot) v = (c(qdot + v) - c(qdot) - c(v)) / 2.
  const VecX zero = VecX::Zero(model.dof());
  const VecX c_sum = inverse_dynamics(model, q, qdot + v, zero, false);
  const VecX c_qd = inverse_dynamics(model, q, qdot, zero, false);
  const VecX c_v = inverse_dynamics(model, q, v, zero, false);
  return 0.5 * (c_sum - c_qd - c_v);
}

}  // namespace reachlab
