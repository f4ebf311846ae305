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

// Analytic operational-space controllers used as deterministic baselines:
// OSC-V resolves a task-space reference velocity through the damped
// pseudoinverse; OSC-A feedback-linearizes a task-space reference
// acceleration.  Both share the pseudoinverse / null-space machinery below.
// Controllers are stateless except OSC-V's one-tick reference-velocity
// memory, which lives in a per-run controller object.

#include "reachlab/arm_model.hpp"

namespace reachlab {

struct TaskGains {
  double kappa_p = 100.0;  // task stiffness (1/s for OSC-V, 1/s^2 for OSC-A)
  double kappa_d = 20.0;   // task damping, OSC-A only
  double kd_joint = 10.0;  // joint-space damping k_d
  double alpha = 1.0;      // null-space force weight
  double damping = 1e-4;   // pseudoinverse regularization
};

struct TaskTarget {
  Vec3 x_d = Vec3::Zero();
  Vec3 xdot_d = Vec3::Zero();
  Vec3 xddot_d = Vec3::Zero();
};

struct NullSpaceObjective {
  VecX rest_pose;          // rad
  double stiffness = 0.0;  // joint-centering force f = stiffness (rest - q)

  VecX force(const VecX& q) const {
    if (stiffness == 0.0 || rest_pose.size() == 0) return VecX::Zero(q.size());
    return stiffness * (rest_pose - q);
  }
};

// J+ = J^T (J J^T + damping^2 I)^-1; the exact Moore-Penrose pseudoinverse at
// damping = 0 for full-row-rank J.
MatX damped_pseudoinverse(const MatX& jac, double damping);

// P = I - J+ J.
MatX nullspace_projector(const MatX& jac, const MatX& jac_pinv);

struct OscStep {
  VecX tau;
  VecX qdot_r;   // OSC-V joint reference velocity (zero for OSC-A)
  VecX qddot_r;  // joint reference acceleration
};

// Velocity-based controller.  Per tick:
//   xdot_r  = kappa_p (x_d - x) + xdot_d
//   qdot_r  = J+ xdot_r - alpha (I - J+ J) f
//   qddot_r = (qdot_r - qdot_r_prev) / dt   (zero on the first tick)
//   tau     = M qddot_r + C qdot_r + g + kd_joint (qdot_r - qdot)
class OscVController {
 public:
  OscVController(TaskGains gains, NullSpaceObjective ns, double dt)
      : gains_(gains), ns_(std::move(ns)), dt_(dt) {}

  OscStep step(const ArmModel& model, const RobotState& state, const TaskTarget& target);
  void reset() { has_prev_ = false; }

 private:
  TaskGains gains_;
  NullSpaceObjective ns_;
  double dt_;
  VecX prev_qdot_r_;
  bool has_prev_ = false;
};

// Simplified acceleration-based controller.  Per tick:
//   xddot_r = kappa_p (x_d - x) + kappa_d (xdot_d - xdot) + xddot_d
//   qddot_r = J+ (xddot_r - Jdot qdot)
//   tau     = M qddot_r + C qdot + g - (I - J+ J)(kd_joint qdot + alpha f)
class OscAController {
 public:
  OscAController(TaskGains gains, NullSpaceObjective ns)
      : gains_(gains), ns_(std::move(ns)) {}

  OscStep step(const ArmModel& model, const RobotState& state, const TaskTarget& target);
  void reset() {}

 private:
  TaskGains gains_;
  NullSpaceObjective ns_;
};

// Joint-space inverse dynamics law with the PD terms outside the inertia:
//   tau = M qddot_d + C qdot_d + g + kp (q_d - q) + kd (qdot_d - qdot)
VecX inverse_dynamics_torque(const ArmModel& model, const RobotState& state,
                             const VecX& q_d, const VecX& qdot_d, const VecX& qddot_d,
                             const VecX& kp, const VecX& kd);

}  // namespace reachlab
