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

// Serial-chain arm description and the kinematics/dynamics quantities every
// controller needs: end-effector pose x, Jacobian J, mass matrix M(q),
// Coriolis and gravity torques.  All-revolute chains only.  M is assembled
// with a composite-rigid-body pass; bias torques come from a recursive
// Newton-Euler pass.  All operations are pure functions of their inputs and
// an ArmModel is immutable after load, so everything here is safe to call
// from any number of threads.

#include <string>
#include <vector>

#include "reachlab/common.hpp"

namespace reachlab {

struct Joint {
  int parent = -1;              // -1 means the fixed base
  Vec3 origin_xyz = Vec3::Zero();   // fixed offset in the parent frame, m
  Mat3 origin_rot = Mat3::Identity();
  Vec3 axis = Vec3::UnitZ();    // unit rotation axis in the joint frame
  double limit_lower = -3.14159265358979323846;
  double limit_upper = 3.14159265358979323846;
  double velocity_limit = 1e9;  // rad/s
};

struct Link {
  double mass = 0.0;            // kg
  Vec3 com = Vec3::Zero();      // center of mass in the link frame, m
  Mat3 inertia = Mat3::Zero();  // rotational inertia about the COM, kg m^2
};

struct CollisionSphere {
  int link = 0;
  Vec3 offset = Vec3::Zero();   // in the link frame, m
  double radius = 0.0;          // m
};

struct EndEffector {
  int link = 0;
  Vec3 offset = Vec3::Zero();   // in the link frame, m
};

struct ArmModel {
  std::string name;
  std::vector<Joint> joints;    // joint i drives link i; chain order
  std::vector<Link> links;
  std::vector<CollisionSphere> collision_spheres;
  EndEffector end_effector;
  Vec3 gravity = Vec3(0, 0, -9.81);  // m/s^2

  int dof() const { return static_cast<int>(joints.size()); }
  VecX lower_limits() const;
  VecX upper_limits() const;
  VecX velocity_limits() const;
  VecX clamp_to_limits(const VecX& q) const;
  // Upper bound on the end-effector distance from the base.
  double max_reach() const;
};

struct RobotState {
  VecX q;           // rad
  VecX qdot;        // rad/s
  VecX qddot_last;  // rad/s^2, realized over the previous control tick

  static RobotState zero(int n) {
    return RobotState{VecX::Zero(n), VecX::Zero(n), VecX::Zero(n)};
  }
};

struct EePose {
  Vec3 position = Vec3::Zero();
  Vec3 linear_velocity = Vec3::Zero();
};

// World placement of every link frame (at its joint origin).
struct LinkFrames {
  std::vector<Mat3> rotation;
  std::vector<Vec3> position;
};

struct SphereState {
  int link = 0;
  Vec3 center = Vec3::Zero();   // world, m
  double radius = 0.0;
  Vec3 velocity = Vec3::Zero(); // world, m/s (filled by link_sphere_states)
};

// ---- model I/O ------------------------------------------------------------

// Loads and validates a model from the structured-text format documented in
// docs/file-formats.md.  Throws Error with a descriptive message on parse
// failures or invariant violations (cyclic/disconnected chains, non-positive
// masses or radii, inverted limits, ...).
ArmModel load_model(const std::string& path);
ArmModel parse_model(const std::string& text, const std::string& source_name = "<string>");
// Validates invariants; called by the loaders, usable on hand-built models.
void validate_model(const ArmModel& model);

// ---- kinematics ------------------------------------------------------------

LinkFrames forward_kinematics_frames(const ArmModel& model, const VecX& q);
Vec3 ee_position(const ArmModel& model, const VecX& q);
Vec3 ee_position(const ArmModel& model, const LinkFrames& frames);
EePose ee_pose(const ArmModel& model, const VecX& q, const VecX& qdot);

// Position Jacobian, 3 x n: xdot = J(q) qdot for the end-effector point.
MatX jacobian(const ArmModel& model, const VecX& q);

// Jdot(q, qdot) * qdot: task-space acceleration of the end-effector point
// when all joint accelerations are zero.
Vec3 jdot_qdot(const ArmModel& model, const VecX& q, const VecX& qdot);

// World centers (and radii) of all collision spheres; velocity filled when
// qdot is supplied.
std::vector<SphereState> link_sphere_centers(const ArmModel& model, const VecX& q);
std::vector<SphereState> link_sphere_states(const ArmModel& model, const VecX& q,
                                            const VecX& qdot);

// ---- dynamics --------------------------------------------------------------

// Inverse dynamics: joint torques realizing qddot at (q, qdot), including
// gravity when with_gravity is set.  Recursive Newton-Euler in world frame.
VecX inverse_dynamics(const ArmModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, bool with_gravity = true);

// Joint-space inertia matrix, symmetric positive-(semi)definite.
MatX mass_matrix(const ArmModel& model, const VecX& q);

struct BiasForces {
  VecX coriolis;  // C(q, qdot) qdot, N m
  VecX gravity;   // g(q), N m
};
BiasForces bias_forces(const ArmModel& model, const VecX& q, const VecX& qdot);

// C(q, qdot) * v for an arbitrary vector v (Christoffel convention),
// recovered from three Newton-Euler passes by polarization.
VecX coriolis_matrix_times(const ArmModel& model, const VecX& q, const VecX& qdot,
                           const VecX& v);

}  // namespace reachlab
