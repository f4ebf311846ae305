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

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "reachlab/curriculum.hpp"
#include "test_util.hpp"

using namespace reachlab;
using namespace reachlab::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("arm-model") {

TEST_CASE("planar2 loads with two joints and in-plane gravity") {
  const ArmModel m = planar2();
  CHECK(m.dof() == 2);
  CHECK(m.links[0].mass == doctest::Approx(1.0));
  CHECK(m.max_reach() == doctest::Approx(2.0));
  CHECK(m.gravity.y() == doctest::Approx(-9.81));
}

TEST_CASE("spatial6 loads and its envelope contains the 0.45 m torus") {
  const ArmModel m = spatial6();
  CHECK(m.dof() == 6);

  // Reachability of sampled torus points via damped-least-squares iteration
  // on the analytic Jacobian, restarted from a few seeds.
  const CurriculumRegion torus =
      CurriculumRegion::partial_torus(0.45, 0.30, 2 * kPi);
  Rng rng(7);
  auto ik_reach = [&](const Vec3& target) {
    for (int restart = 0; restart < 5; ++restart) {
      VecX q = restart == 0 ? VecX::Zero(6) : random_q(m, rng, 0.2);
      for (int it = 0; it < 300; ++it) {
        const Vec3 err = target - ee_position(m, q);
        if (err.norm() < 1e-4) return true;
        const MatX jac = jacobian(m, q);
        const MatX ipinv =
            jac.transpose() *
            (jac * jac.transpose() + 1e-6 * MatX::Identity(3, 3)).inverse();
        q = m.clamp_to_limits(q + ipinv * err);
      }
    }
    return false;
  };

  int reached = 0;
  const int samples = 120;
  for (int s = 0; s < samples; ++s) {
    const Vec3 target = sample_goal(torus, rng);
    if (ik_reach(target)) ++reached;
  }
  CHECK(reached == samples);
}

TEST_CASE("model files with violated invariants are rejected") {
  const char* negative_mass = R"(reachlab-model v1
joint 0 {
  axis 0 0 1
  limits -1 1
}
link 0 {
  mass -1
  inertia 0 0 0 0 0 0
}
end_effector {
  link 0
  offset 1 0 0
}
)";
  CHECK_THROWS_WITH_AS(parse_model(negative_mass), doctest::Contains("mass"), Error);

  const char* disconnected = R"(reachlab-model v1
joint 0 {
  axis 0 0 1
  limits -1 1
}
link 0 {
  mass 1
  inertia 0 0 0 0 0 0
}
joint 1 {
  parent 3
  axis 0 0 1
  limits -1 1
}
link 1 {
  mass 1
  inertia 0 0 0 0 0 0
}
end_effector {
  link 1
  offset 1 0 0
}
)";
  CHECK_THROWS_WITH_AS(parse_model(disconnected), doctest::Contains("chain"), Error);

  const char* bad_radius = R"(reachlab-model v1
joint 0 {
  axis 0 0 1
  limits -1 1
}
link 0 {
  mass 1
  inertia 0 0 0 0 0 0
}
sphere {
  link 0
  offset 0 0 0
  radius -0.1
}
end_effector {
  link 0
  offset 1 0 0
}
)";
  CHECK_THROWS_WITH_AS(parse_model(bad_radius), doctest::Contains("radius"), Error);

  const char* inverted_limits = R"(reachlab-model v1
joint 0 {
  axis 0 0 1
  limits 1 -1
}
link 0 {
  mass 1
  inertia 0 0 0 0 0 0
}
end_effector {
  link 0
  offset 1 0 0
}
)";
  CHECK_THROWS_AS(parse_model(inverted_limits), Error);
}

TEST_CASE("forward kinematics matches two-link geometry") {
  const ArmModel m = planar2();
  VecX q(2);
  q << 0, 0;
  Vec3 x = ee_position(m, q);
  CHECK(x.x() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(x.y() == doctest::Approx(0.0).epsilon(1e-12));

  q << 0, kPi / 2;
  x = ee_position(m, q);
  CHECK(x.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("forward kinematics agrees with the transform-chain oracle") {
  const ArmModel m = spatial6();
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX q = random_q(m, rng);
    const Vec3 x = ee_position(m, q);
    const Vec3 ox = oracles::fk_ee_oracle(m, q);
    CHECK((x - ox).norm() <= 1e-12);
  }
}

TEST_CASE("jacobian matches the two-link closed form at zero") {
  const ArmModel m = planar2();
  VecX q(2);
  q << 0, 0;
  const MatX jac = jacobian(m, q);
  CHECK(jac(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(jac(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(jac(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(jac(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jacobian columns agree with central differences") {
  Rng rng(13);
  for (const ArmModel& m : {planar2(), spatial6()}) {
    for (int trial = 0; trial < 25; ++trial) {
      const VecX q = random_q(m, rng);
      const MatX jac = jacobian(m, q);
      const MatX fd = oracles::jacobian_fd(m, q);
      const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
      CHECK((jac - fd).cwiseAbs().maxCoeff() / scale <= 1e-6);
    }
  }
}

TEST_CASE("folded planar2 jacobian keeps the oracle's signs") {
  const ArmModel m = planar2();
  VecX q(2);
  q << 0, kPi - 1e-3;  // just inside the joint-1 limit
  const MatX jac = jacobian(m, q);
  const MatX fd = oracles::jacobian_fd(m, q);
  CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-6);
  // Second column is ~(0, -1) * l2 when folded back.
  CHECK(jac(1, 1) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("planar2 mass matrix matches the textbook closed form") {
  const ArmModel m = planar2();
  VecX q(2);
  q << 0.3, 0.0;
  const MatX got = mass_matrix(m, q);
  CHECK(std::abs(got(0, 0) - 5.0) <= 1e-10);
  CHECK(std::abs(got(0, 1) - 2.0) <= 1e-10);
  CHECK(std::abs(got(1, 0) - 2.0) <= 1e-10);
  CHECK(std::abs(got(1, 1) - 1.0) <= 1e-10);

  const oracles::Planar2Closed closed;
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX qr = random_q(m, rng);
    CHECK((mass_matrix(m, qr) - closed.mass(qr)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("mass matrix is symmetric positive-definite") {
  Rng rng(19);
  for (const ArmModel& m : {planar2(), spatial6()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const VecX q = random_q(m, rng);
      const MatX inertia = mass_matrix(m, q);
      CHECK((inertia - inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      Eigen::SelfAdjointEigenSolver<MatX> es(inertia);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("mass matrix columns agree with Newton-Euler unit-acceleration probes") {
  const ArmModel m = spatial6();
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX q = random_q(m, rng);
    const MatX inertia = mass_matrix(m, q);
    for (int j = 0; j < m.dof(); ++j) {
      VecX e = VecX::Zero(m.dof());
      e[j] = 1.0;
      const VecX column = inverse_dynamics(m, q, VecX::Zero(m.dof()), e, false);
      CHECK((inertia.col(j) - column).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("planar2 gravity torques match the closed form") {
  const ArmModel m = planar2();
  VecX q = VecX::Zero(2);
  const BiasForces bias = bias_forces(m, q, VecX::Zero(2));
  CHECK(std::abs(bias.gravity[0] - 29.43) <= 1e-10);
  CHECK(std::abs(bias.gravity[1] - 9.81) <= 1e-10);

  const oracles::Planar2Closed closed;
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX qr = random_q(m, rng);
    const BiasForces b = bias_forces(m, qr, VecX::Zero(2));
    CHECK((b.gravity - closed.gravity_torque(qr)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("coriolis torques vanish at rest and gravity obeys the switch") {
  Rng rng(31);
  for (const ArmModel& base : {planar2(), spatial6()}) {
    const VecX q = random_q(base, rng);
    const BiasForces bias = bias_forces(base, q, VecX::Zero(base.dof()));
    CHECK(bias.coriolis.cwiseAbs().maxCoeff() == 0.0);

    ArmModel no_gravity = base;
    no_gravity.gravity = Vec3::Zero();
    const BiasForces b0 = bias_forces(no_gravity, q, VecX::Zero(base.dof()));
    CHECK(b0.gravity.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("coriolis matrix product matches the planar closed form") {
  const ArmModel m = planar2();
  const oracles::Planar2Closed closed;
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX q = random_q(m, rng);
    const VecX qd = random_vec(2, rng, 2.0);
    const VecX v = random_vec(2, rng, 2.0);
    const VecX got = coriolis_matrix_times(m, q, qd, v);
    const VecX want = closed.coriolis_matrix(q, qd) * v;
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-9);
    // Consistency with the quadratic form computed by the Newton-Euler pass.
    const VecX cqd = coriolis_matrix_times(m, q, qd, qd);
    const VecX rnea = bias_forces(m, q, qd).coriolis;
    CHECK((cqd - rnea).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("link sphere centers follow the link frames") {
  const ArmModel m = planar2();
  VecX q(2);
  q << kPi / 2, 0.0;
  const auto spheres = link_sphere_centers(m, q);
  // Sphere at the tip of link 0 lands at (0, 1, 0).
  bool found = false;
  for (const auto& s : spheres) {
    if (s.link == 0 && std::abs(s.center.y() - 1.0) < 1e-12 &&
        std::abs(s.center.x()) < 1e-12)
      found = true;
  }
  CHECK(found);

  const ArmModel m6 = spatial6();
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX qr = random_q(m6, rng);
    const auto got = link_sphere_centers(m6, qr);
    const auto frames = oracles::fk_transform_chain(m6, qr);
    for (size_t k = 0; k < got.size(); ++k) {
      const auto& def = m6.collision_spheres[k];
      Eigen::Vector4d p;
      p << def.offset, 1.0;
      const Vec3 want = (frames[size_t(def.link)] * p).head<3>();
      CHECK((got[k].center - want).norm() <= 1e-12);
    }
  }
}

TEST_CASE("sphere at a fixed base offset never moves") {
  // A sphere with zero offset on a link whose joint sits at the origin.
  const char* text = R"(reachlab-model v1
gravity 0 0 -9.81
joint 0 {
  axis 0 0 1
  limits -3 3
}
link 0 {
  mass 1
  com 0.5 0 0
  inertia 0.01 0.01 0.01 0 0 0
}
sphere {
  link 0
  offset 0 0 0
  radius 0.1
}
end_effector {
  link 0
  offset 1 0 0
}
)";
  const ArmModel m = parse_model(text);
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    VecX q(1);
    q << rng.uniform(-3.0, 3.0);
    const auto spheres = link_sphere_centers(m, q);
    CHECK(spheres[0].center.norm() <= 1e-15);
  }
}

}  // TEST_SUITE
