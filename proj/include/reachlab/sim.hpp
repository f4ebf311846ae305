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

// Torque-level time stepping and the joint PD law with dynamics compensation.
// The PD controller plays the role of the robot's internal controller: it has
// exact C and g.  Stepping is semi-implicit Euler over substeps; joint
// position limits are a hard clamp with the velocity zeroed on the clamped
// axis.  Stepping is pure state-in/state-out, so independent simulations can
// run in parallel.

#include <iosfwd>
#include <string>

#include "reachlab/arm_model.hpp"

namespace reachlab {

struct PDGains {
  VecX kp;  // 1/s^2
  VecX kd;  // 1/s

  static PDGains uniform(int n, double kp, double kd) {
    return PDGains{VecX::Constant(n, kp), VecX::Constant(n, kd)};
  }
};

struct JointCommand {
  VecX q_d;     // rad
  VecX qdot_d;  // rad/s

  static JointCommand hold(const VecX& q) {
    return JointCommand{q, VecX::Zero(q.size())};
  }
};

enum class IntegrationMode {
  kAccumulate,         // q_d <- q_d + qdot_d dt
  kReferencePosition,  // q_d <- q + lambda1 dt qdot_d
};

struct SimConfig {
  double dt = 0.01;    // control tick, s
  int substeps = 4;    // physics sub-integration per tick
  IntegrationMode integration_mode = IntegrationMode::kAccumulate;
  double lambda1 = 0.5;

  double substep_dt() const { return dt / substeps; }
};

// tau = C qdot + g + kp (q_d - q) + kd (qdot_d - qdot).  No inertia term on
// the desired acceleration.
VecX pd_torque(const ArmModel& model, const RobotState& state, const JointCommand& cmd,
               const PDGains& gains);

// Advances one control tick under constant torque.  qddot_last is the
// realized (qdot_new - qdot_old) / dt.  Throws Error(kNumeric) when the mass
// matrix is numerically singular (condition estimate > 1e12).
RobotState step(const ArmModel& model, const RobotState& state, const VecX& tau,
                const SimConfig& cfg);

// Folds a fresh velocity command into the running command per the configured
// integration mode; q_d is clamped to the position limits.
JointCommand integrate_command(const ArmModel& model, const JointCommand& cmd,
                               const VecX& qdot_d_new, const RobotState& state,
                               const SimConfig& cfg);

// CSV trajectory traces: t, q_1..q_n, qd_1..qd_n, ee_x, ee_y, ee_z, err_m.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out, int dof);
  void record(double t, const RobotState& state, const Vec3& ee, double error_m);

 private:
  std::ostream& out_;
};

}  // namespace reachlab
