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

#include "reachlab/osc.hpp"

namespace reachlab {

MatX damped_pseudoinverse(const MatX& jac, double damping) {
  check_arg(damping >= 0, "pseudoinverse damping must be >= 0");
  const MatX gram =
      jac * jac.transpose() + damping * damping * MatX::Identity(jac.rows(), jac.rows());
  return jac.transpose() * gram.ldlt().solve(MatX::Identity(jac.rows(), jac.rows()));
}

MatX nullspace_projector(const MatX& jac, const MatX& jac_pinv) {
  check_arg(jac.cols() == jac_pinv.rows() && jac.rows() == jac_pinv.cols(),
            "projector dimensions disagree");
  return MatX::Identity(jac.cols(), jac.cols()) - jac_pinv * jac;
}

OscStep OscVController::step(const ArmModel& model, const RobotState& state,
                             const TaskTarget& target) {
  const int n = model.dof();
  const Vec3 x = ee_position(model, state.q);
  const MatX jac = jacobian(model, state.q);
  const MatX jac_pinv = damped_pseudoinverse(jac, gains_.damping);

  const Vec3 xdot_r = gains_.kappa_p * (target.x_d - x) + target.xdot_d;
  const VecX qdot_r = jac_pinv * xdot_r -
                      gains_.alpha * (nullspace_projector(jac, jac_pinv) * ns_.force(state.q));

  VecX qddot_r = VecX::Zero(n);
  if (has_prev_) qddot_r = (qdot_r - prev_qdot_r_) / dt_;
  prev_qdot_r_ = qdot_r;
  has_prev_ = true;

  const MatX inertia = mass_matrix(model, state.q);
  const BiasForces bias = bias_forces(model, state.q, state.qdot);
  const VecX coriolis_ref = coriolis_matrix_times(model, state.q, state.qdot, qdot_r);

  OscStep out;
  out.qdot_r = qdot_r;
  out.qddot_r = qddot_r;
  out.tau = inertia * qddot_r + coriolis_ref + bias.gravity +
            gains_.kd_joint * (qdot_r - state.qdot);
  return out;
}

OscStep OscAController::step(const ArmModel& model, const RobotState& state,
                             const TaskTarget& target) {
  const int n = model.dof();
  const Vec3 x = ee_position(model, state.q);
  const MatX jac = jacobian(model, state.q);
  const MatX jac_pinv = damped_pseudoinverse(jac, gains_.damping);
  const Vec3 xdot = jac * state.qdot;

  const Vec3 xddot_r = gains_.kappa_p * (target.x_d - x) +
                       gains_.kappa_d * (target.xdot_d - xdot) + target.xddot_d;
  const VecX qddot_r = jac_pinv * (xddot_r - jdot_qdot(model, state.q, state.qdot));

  const MatX inertia = mass_matrix(model, state.q);
  const BiasForces bias = bias_forces(model, state.q, state.qdot);
  const MatX proj = nullspace_projector(jac, jac_pinv);

  OscStep out;
  out.qdot_r = VecX::Zero(n);
  out.qddot_r = qddot_r;
  out.tau = inertia * qddot_r + bias.coriolis + bias.gravity -
            proj * (gains_.kd_joint * state.qdot + gains_.alpha * ns_.force(state.q));
  return out;
}

VecX inverse_dynamics_torque(const ArmModel& model, const RobotState& state,
                             const VecX& q_d, const VecX& qdot_d, const VecX& qddot_d,
                             const VecX& kp, const VecX& kd) {
  const int n = model.dof();
  check_arg(q_d.size() == n && qdot_d.size() == n && qddot_d.size() == n,
            "desired trajectory has wrong dimension");
  const MatX inertia = mass_matrix(model, state.q);
  const BiasForces bias = bias_forces(model, state.q, state.qdot);
  const VecX coriolis_des = coriolis_matrix_times(model, state.q, state.qdot, qdot_d);
  return inertia * qddot_d + coriolis_des + bias.gravity +
         kp.cwiseProduct(q_d - state.q) + kd.cwiseProduct(qdot_d - state.qdot);
}

}  // namespace reachlab
