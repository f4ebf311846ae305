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

#include "reachlab/reach_env.hpp"

#include <cmath>

namespace reachlab {

double reward(const RewardWeights& weights, const Vec3& delta_x, const VecX& qddot,
              double psi_sum) {
  return std::exp(-weights.lambda_err * delta_x.squaredNorm()) -
         weights.lambda_eff * qddot.norm() - weights.lambda_obs * psi_sum;
}

ObstacleSet place_obstacles(const CurriculumRegion& region, const Vec3& start_ee,
                            const Vec3& goal, int count, double radius,
                            double clearance, Rng& rng,
                            const std::vector<SphereState>* start_arm) {
  check_arg(count >= 1, "obstacle count must be >= 1");
  check_arg(radius > 0 && clearance >= 0, "invalid obstacle radius/clearance");
  ObstacleSet set;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const Vec3 c = sample_goal(region, rng);
      if ((c - start_ee).norm() - radius < clearance) continue;
      if ((c - goal).norm() - radius < clearance) continue;
      if (start_arm) {
        bool hits_arm = false;
        for (const auto& s : *start_arm)
          if ((c - s.center).norm() - radius - s.radius < 0.01) {
            hits_arm = true;
            break;
          }
        if (hits_arm) continue;
      }
      set.spheres.push_back(SphereObstacle{c, radius});
      placed = true;
      break;
    }
    if (!placed)
      fail(ErrorCode::kNumeric, "obstacle placement exceeded the rejection budget");
  }
  return set;
}

ReachEnv::ReachEnv(ArmModel model, SimConfig sim, PDGains gains, EpisodeConfig episode,
                   RewardWeights weights, CurriculumRegion region, uint64_t seed)
    : model_(std::move(model)),
      sim_(sim),
      gains_(std::move(gains)),
      episode_(std::move(episode)),
      weights_(weights),
      region_(region),
      rng_(seed) {
  const int n = model_.dof();
  if (episode_.home_pose.size() == 0) episode_.home_pose = VecX::Zero(n);
  check_arg(episode_.home_pose.size() == n, "home pose has wrong dimension");
  if (episode_.action_scale.size() == 0) episode_.action_scale = model_.velocity_limits();
  check_arg(episode_.action_scale.size() == n, "action scale has wrong dimension");
  check_arg(episode_.horizon_steps > 0, "horizon must be positive");
  check_arg(region_.max_distance_from_origin() <= model_.max_reach() + 1e-9,
            "goal region extends beyond the arm's reach envelope");
  state_ = RobotState::zero(n);
  state_.q = model_.clamp_to_limits(episode_.home_pose);
  command_ = JointCommand::hold(state_.q);
  refresh_distances();
}

int ReachEnv::obs_dim() const {
  const int n = model_.dof();
  return (episode_.obstacles.enabled && episode_.obstacles.observe) ? 3 + 5 * n
                                                                    : 3 + 2 * n;
}

void ReachEnv::set_region(const CurriculumRegion& region, int region_index) {
  check_arg(region.max_distance_from_origin() <= model_.max_reach() + 1e-9,
            "goal region extends beyond the arm's reach envelope");
  region_ = region;
  region_index_ = region_index;
}

bool ReachEnv::abort_active() const {
  switch (episode_.abort_scope) {
    case AbortScope::kAll:
      return true;
    case AbortScope::kNone:
      return false;
    case AbortScope::kFirstRegionOnly:
      return region_index_ == 0;
  }
  return false;
}

void ReachEnv::set_state(const RobotState& state) {
  check_arg(state.q.size() == model_.dof(), "state has wrong dimension");
  state_ = state;
  refresh_distances();
}

void ReachEnv::set_goal(const Vec3& goal) { goal_ = goal; }

void ReachEnv::set_obstacles(const ObstacleSet& set) {
  obstacles_ = set;
  refresh_distances();
}

double ReachEnv::error() const {
  return (goal_ - ee_position(model_, state_.q)).norm();
}

VecX ReachEnv::begin_episode() {
  if (first_episode_ || last_episode_aborted_) {
    state_ = RobotState::zero(model_.dof());
    state_.q = model_.clamp_to_limits(episode_.home_pose);
  }
  first_episode_ = false;
  last_episode_aborted_ = false;
  steps_ = 0;
  command_ = JointCommand::hold(state_.q);
  goal_ = sample_goal(region_, rng_);

  obstacles_ = ObstacleSet{};
  if (episode_.obstacles.enabled) {
    const auto& oc = episode_.obstacles;
    const int count =
        oc.count_min +
        static_cast<int>(rng_.uniform_index(uint64_t(oc.count_max - oc.count_min + 1)));
    if (count > 0) {
      const auto arm = link_sphere_centers(model_, state_.q);
      obstacles_ = place_obstacles(region_, ee_position(model_, state_.q), goal_, count,
                                   oc.radius, oc.clearance, rng_, &arm);
    }
  }
  refresh_distances();
  return observation();
}

void ReachEnv::refresh_distances() {
  const auto spheres = link_sphere_states(model_, state_.q, state_.qdot);
  distances_ = closest_points(spheres, obstacles_);
}

VecX ReachEnv::observation() const {
  const int n = model_.dof();
  VecX obs(obs_dim());
  const Vec3 delta = goal_ - ee_position(model_, state_.q);
  obs.segment<3>(0) = delta;
  obs.segment(3, n) = state_.q;
  obs.segment(3 + n, n) = state_.qdot;
  if (obs.size() == 3 + 5 * n) {
    // One distance vector per link; links without collision spheres (or with
    // nothing nearby) carry the far sentinel.
    std::vector<Vec3> d(n, Vec3(0, 0, kFarSentinelDistance));
    for (const auto& l : distances_.per_link)
      if (l.link >= 0 && l.link < n) d[l.link] = l.d;
    for (int i = 0; i < n; ++i) obs.segment<3>(3 + 2 * n + 3 * i) = d[i];
  }
  return obs;
}

void ReachEnv::start_trial() {
  steps_ = 0;
  command_ = JointCommand::hold(state_.q);
  refresh_distances();
}

StepResult ReachEnv::step(const VecX& action) {
  const int n = model_.dof();
  check_arg(action.size() == n, "action has wrong dimension");
  check_arg(action.allFinite(), "action must be finite");

  const VecX clamped =
      action.cwiseMax(-episode_.action_scale).cwiseMin(episode_.action_scale);
  command_ = integrate_command(model_, command_, clamped, state_, sim_);
  return step_torque(pd_torque(model_, state_, command_, gains_));
}

StepResult ReachEnv::step_torque(const VecX& tau) {
  state_ = reachlab::step(model_, state_, tau, sim_);
  refresh_distances();
  ++steps_;

  const Vec3 delta = goal_ - ee_position(model_, state_.q);
  const PenaltySummary psi = obstacle_penalties(distances_, weights_.d_max);

  StepResult r;
  r.info.error_m = delta.norm();
  r.info.qddot_norm = state_.qddot_last.norm();
  r.info.psi_sum = psi.total;
  r.info.min_separation = distances_.min_separation();
  r.info.collided = !obstacles_.empty() && r.info.min_separation < 0.0;
  r.info.abort = r.info.error_m > episode_.abort_distance;
  r.info.timeout = steps_ >= episode_.horizon_steps;
  r.rew = reward(weights_, delta, state_.qddot_last, psi.total);

  const bool aborted = r.info.abort && abort_active();
  r.done = aborted || r.info.timeout;
  r.terminal = aborted;
  if (r.done) last_episode_aborted_ = aborted;
  r.observation = observation();
  return r;
}

}  // namespace reachlab
