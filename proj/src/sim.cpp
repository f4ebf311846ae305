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

#include "reachlab/sim.hpp"

#include <cmath>
#include <ostream>

namespace reachlab {

VecX pd_torque(const ArmModel& model, const RobotState& state, const JointCommand& cmd,
               const PDGains& gains) {
  const int n = model.dof();
  check_arg(cmd.q_d.size() == n && cmd.qdot_d.size() == n, "command has wrong dimension");
  check_arg(gains.kp.size() == n && gains.kd.size() == n, "gains have wrong dimension");
  const BiasForces bias = bias_forces(model, state.q, state.qdot);
  return bias.coriolis + bias.gravity +
         gains.kp.cwiseProduct(cmd.q_d - state.q) +
         gains.kd.cwiseProduct(cmd.qdot_d - state.qdot);
}

RobotState step(const ArmModel& model, const RobotState& state, const VecX& tau,
                const SimConfig& cfg) {
  const int n = model.dof();
  check_arg(tau.size() == n, "tau has wrong dimension");
  check_arg(tau.allFinite(), "tau must be finite");
  check_arg(cfg.dt > 0 && cfg.substeps >= 1, "invalid sim config");

  const double h = cfg.substep_dt();
  VecX q = state.q;
  VecX qdot = state.qdot;
  for (int s = 0; s < cfg.substeps; ++s) {
    const MatX inertia = mass_matrix(model, q);
    Eigen::LDLT<MatX> ldlt(inertia);
    // Cheap condition estimate from the diagonal of the factorization.
    const VecX d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (!(dmin > 0.0) || dmax / dmin > 1e12)
      fail(ErrorCode::kNumeric, "mass matrix is numerically singular");

    const BiasForces bias = bias_forces(model, q, qdot);
    const VecX qddot = ldlt.solve(tau - bias.coriolis - bias.gravity);
    qdot += qddot * h;
    q += qdot * h;
    for (int i = 0; i < n; ++i) {
      const Joint& j = model.joints[i];
      if (q[i] < j.limit_lower) {
        q[i] = j.limit_lower;
        qdot[i] = 0.0;
      } else if (q[i] > j.limit_upper) {
        q[i] = j.limit_upper;
        qdot[i] = 0.0;
      }
    }
  }

  RobotState next;
  next.q = q;
  next.qdot = qdot;
  next.qddot_last = (qdot - state.qdot) / cfg.dt;
  return next;
}

JointCommand integrate_command(const ArmModel& model, const JointCommand& cmd,
                               const VecX& qdot_d_new, const RobotState& state,
                               const SimConfig& cfg) {
  check_arg(qdot_d_new.size() == model.dof(), "command velocity has wrong dimension");
  JointCommand next;
  switch (cfg.integration_mode) {
    case IntegrationMode::kAccumulate:
      next.q_d = cmd.q_d + qdot_d_new * cfg.dt;
      break;
    case IntegrationMode::kReferencePosition:
      next.q_d = state.q + cfg.lambda1 * cfg.dt * qdot_d_new;
      break;
  }
  next.q_d = model.clamp_to_limits(next.q_d);
  next.qdot_d = qdot_d_new;
  return next;
}

TraceWriter::TraceWriter(std::ostream& out, int dof) : out_(out) {
  out_ << "t";
  for (int i = 1; i <= dof; ++i) out_ << ",q" << i;
  for (int i = 1; i <= dof; ++i) out_ << ",qd" << i;
  out_ << ",ee_x,ee_y,ee_z,err_m\n";
}

void TraceWriter::record(double t, const RobotState& state, const Vec3& ee,
                         double error_m) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    out_ << ',' << buf;
  };
  std::snprintf(buf, sizeof buf, "%.9g", t);
  out_ << buf;
  for (int i = 0; i < state.q.size(); ++i) put(state.q[i]);
  for (int i = 0; i < state.qdot.size(); ++i) put(state.qdot[i]);
  put(ee.x());
  put(ee.y());
  put(ee.z());
  put(error_m);
  out_ << '\n';
}

}  // namespace reachlab
