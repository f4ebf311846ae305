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

#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "reachlab/sim.hpp"
#include "test_util.hpp"

using namespace reachlab;
using namespace reachlab::testing;

TEST_SUITE("sim-core") {

TEST_CASE("pd torque reduces to bias terms when the error vanishes") {
  const ArmModel m = planar2();
  Rng rng(3);
  RobotState s = RobotState::zero(2);
  s.q = random_q(m, rng);
  s.qdot = random_vec(2, rng, 1.0);
  const PDGains gains = PDGains::uniform(2, 100.0, 10.0);

  JointCommand cmd;
  cmd.q_d = s.q;
  cmd.qdot_d = s.qdot;
  const VecX tau = pd_torque(m, s, cmd, gains);
  const BiasForces bias = bias_forces(m, s.q, s.qdot);
  CHECK((tau - bias.coriolis - bias.gravity).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pd torque at rest with a held target is pure gravity") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  s.q << 0.4, -0.7;
  const VecX tau =
      pd_torque(m, s, JointCommand::hold(s.q), PDGains::uniform(2, 400, 40));
  const BiasForces bias = bias_forces(m, s.q, VecX::Zero(2));
  CHECK((tau - bias.gravity).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pd torque with a position step adds kp times the error") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  JointCommand cmd;
  cmd.q_d = VecX(2);
  cmd.q_d << 0.1, 0.0;
  cmd.qdot_d = VecX::Zero(2);
  const VecX tau = pd_torque(m, s, cmd, PDGains::uniform(2, 100.0, 0.0));
  CHECK(tau[0] == doctest::Approx(29.43 + 10.0).epsilon(1e-12));
  CHECK(tau[1] == doctest::Approx(9.81).epsilon(1e-12));
}

TEST_CASE("gravity hold is a machine-precision fixed point of step") {
  Rng rng(5);
  for (const ArmModel& m : {planar2(), spatial6()}) {
    const int n = m.dof();
    SimConfig cfg;
    for (int trial = 0; trial < 5; ++trial) {
      RobotState s = RobotState::zero(n);
      s.q = random_q(m, rng);
      const VecX tau =
          pd_torque(m, s, JointCommand::hold(s.q), PDGains::uniform(n, 400, 40));
      const RobotState next = step(m, s, tau, cfg);
      CHECK((next.q - s.q).cwiseAbs().maxCoeff() == 0.0);
      CHECK(next.qdot.cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("free rotation with no gravity conserves kinetic energy") {
  for (ArmModel m : {planar2(), spatial6()}) {
    m.gravity = Vec3::Zero();
    const int n = m.dof();
    // Wide limits so the clamp never interferes with the free spin.
    for (auto& j : m.joints) {
      j.limit_lower = -1e9;
      j.limit_upper = 1e9;
    }
    RobotState s = RobotState::zero(n);
    s.qdot = VecX::Constant(n, 0.8);
    s.qdot[n - 1] = -0.5;

    SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.substeps = 1;
    const VecX tau = VecX::Zero(n);
    auto energy = [&](const RobotState& st) {
      return 0.5 * st.qdot.dot(mass_matrix(m, st.q) * st.qdot);
    };
    const double e0 = energy(s);
    for (int i = 0; i < 10000; ++i) s = step(m, s, tau, cfg);
    CHECK(std::abs(energy(s) - e0) / e0 < 1e-3);
  }
}

TEST_CASE("position limits clamp q and zero the clamped velocity") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  s.q << 0.0, 2.95;  // near the +3.0 limit of joint 1
  SimConfig cfg;
  VecX tau = bias_forces(m, s.q, VecX::Zero(2)).gravity;
  tau[1] += 50.0;  // drive joint 1 into its limit
  for (int i = 0; i < 200; ++i) {
    s = step(m, s, tau, cfg);
    tau = bias_forces(m, s.q, s.qdot).gravity;
    tau[1] += 50.0;
    if (s.q[1] >= 3.0) break;
  }
  CHECK(s.q[1] == doctest::Approx(3.0));
  CHECK(s.qdot[1] == 0.0);
}

TEST_CASE("a mass matrix with an empty row raises the numeric fault") {
  // Point mass sitting exactly on the rotation axis: no inertia about it.
  const char* text = R"(reachlab-model v1
gravity 0 0 0
joint 0 {
  axis 1 0 0
  limits -3 3
}
link 0 {
  mass 1
  com 0.5 0 0
  inertia 0 0 0 0 0 0
}
end_effector {
  link 0
  offset 0.5 0 0
}
)";
  const ArmModel m = parse_model(text);
  RobotState s = RobotState::zero(1);
  SimConfig cfg;
  CHECK_THROWS_AS(step(m, s, VecX::Zero(1), cfg), Error);
}

TEST_CASE("integrate_command accumulates or tracks the reference position") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  SimConfig cfg;

  JointCommand cmd;
  cmd.q_d = VecX::Zero(2);
  cmd.qdot_d = VecX::Zero(2);
  VecX qdot_new(2);
  qdot_new << 1.0, 0.0;
  const JointCommand acc = integrate_command(m, cmd, qdot_new, s, cfg);
  CHECK(acc.q_d[0] == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(acc.q_d[1] == doctest::Approx(0.0));
  CHECK(acc.qdot_d[0] == doctest::Approx(1.0));

  cfg.integration_mode = IntegrationMode::kReferencePosition;
  s.q << 1.0, 1.0;
  qdot_new << 2.0, 0.0;
  const JointCommand ref = integrate_command(m, cmd, qdot_new, s, cfg);
  CHECK(ref.q_d[0] == doctest::Approx(1.01).epsilon(1e-12));
  CHECK(ref.q_d[1] == doctest::Approx(1.0));

  const JointCommand still = integrate_command(m, cmd, VecX::Zero(2), s, cfg);
  CHECK((still.q_d - s.q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("integrate_command clamps the commanded position to the limits") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  SimConfig cfg;
  JointCommand cmd;
  cmd.q_d = VecX(2);
  cmd.q_d << 0.0, 2.999;
  cmd.qdot_d = VecX::Zero(2);
  VecX fast(2);
  fast << 0.0, 10.0;
  const JointCommand next = integrate_command(m, cmd, fast, s, cfg);
  CHECK(next.q_d[1] == doctest::Approx(3.0));
}

TEST_CASE("stepping is deterministic") {
  const ArmModel m = spatial6();
  Rng rng(9);
  RobotState s = RobotState::zero(6);
  s.q = random_q(m, rng);
  s.qdot = random_vec(6, rng, 0.5);
  const VecX tau = random_vec(6, rng, 5.0);
  SimConfig cfg;
  const RobotState a = step(m, s, tau, cfg);
  const RobotState b = step(m, s, tau, cfg);
  CHECK((a.q - b.q).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.qdot - b.qdot).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.qddot_last - b.qddot_last).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("qddot_last reports the realized tick acceleration") {
  const ArmModel m = planar2();
  RobotState s = RobotState::zero(2);
  s.q << 0.2, 0.4;
  SimConfig cfg;
  VecX tau = bias_forces(m, s.q, VecX::Zero(2)).gravity;
  tau[0] += 1.0;
  const RobotState next = step(m, s, tau, cfg);
  CHECK((next.qddot_last - (next.qdot - s.qdot) / cfg.dt).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("trace rows carry time, joints, velocities and error") {
  std::ostringstream out;
  TraceWriter trace(out, 2);
  RobotState s = RobotState::zero(2);
  s.q << 0.5, -0.25;
  trace.record(0.01, s, Vec3(1.5, 0.25, 0.0), 0.125);
  const std::string text = out.str();
  CHECK(text.find("t,q1,q2,qd1,qd2,ee_x,ee_y,ee_z,err_m\n") == 0);
  CHECK(text.find("0.01,0.5,-0.25,0,0,1.5,0.25,0,0.125") != std::string::npos);
}

}  // TEST_SUITE
