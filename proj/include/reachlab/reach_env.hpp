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

// The reaching MDP: observation assembly, reward, goal and obstacle
// sampling, termination and episode bookkeeping.  Episodes are sequential:
// each starts where the previous one ended, except after an abort (or the
// very first episode), which starts from the home pose.  Each environment
// instance is owned and stepped by a single worker.

#include <memory>
#include <optional>

#include "reachlab/curriculum.hpp"
#include "reachlab/obstacle_geometry.hpp"
#include "reachlab/sim.hpp"

namespace reachlab {

struct RewardWeights {
  double lambda_err = 20.0;   // 1/m^2
  double lambda_eff = 0.005;  // s^2/rad
  double lambda_obs = 0.1;
  double d_max = 0.05;        // m
};

// r = exp(-lambda_err |dx|^2) - lambda_eff |qddot| - lambda_obs sum(psi);
// qddot is the realized acceleration of the last physics tick.  r <= 1, with
// equality iff dx = 0, qddot = 0 and every psi = 0.
double reward(const RewardWeights& weights, const Vec3& delta_x, const VecX& qddot,
              double psi_sum);

enum class AbortScope { kFirstRegionOnly, kAll, kNone };

struct ObstacleConfig {
  bool enabled = false;
  bool observe = true;   // include distance vectors in the observation
  int count_min = 1;
  int count_max = 3;
  double radius = 0.08;     // m
  double clearance = 0.05;  // m, surface-to-point from start and goal
};

struct EpisodeConfig {
  int horizon_steps = 800;       // 8 s at dt = 0.01
  double abort_distance = 0.80;  // m
  AbortScope abort_scope = AbortScope::kFirstRegionOnly;
  VecX home_pose;
  VecX action_scale;             // rad/s cap on |qdot_d|; default: velocity limits
  ObstacleConfig obstacles;
};

// Randomly placed spherical obstacles, resampled until every sphere clears
// the start and goal points by `clearance` (surface-to-point) and does not
// penetrate the robot's start configuration when `start_arm` is given.
ObstacleSet place_obstacles(const CurriculumRegion& region, const Vec3& start_ee,
                            const Vec3& goal, int count, double radius,
                            double clearance, Rng& rng,
                            const std::vector<SphereState>* start_arm = nullptr);

struct StepInfo {
  double error_m = 0.0;       // |x_d - x| after the step
  double qddot_norm = 0.0;
  double psi_sum = 0.0;
  double min_separation = 1e9;
  bool collided = false;      // any link separation < 0 this tick
  bool abort = false;         // |dx| exceeded the abort distance
  bool timeout = false;
};

struct StepResult {
  VecX observation;
  double rew = 0.0;
  bool done = false;      // episode ended (abort or horizon)
  bool terminal = false;  // true termination (abort); horizon is a truncation
  StepInfo info;
};

// Minimal environment surface the rollout collector needs; implemented by
// ReachEnv and by test/toy environments.
class EnvInterface {
 public:
  virtual ~EnvInterface() = default;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual void reseed(uint64_t seed) = 0;
  virtual VecX begin_episode() = 0;
  virtual StepResult step(const VecX& action) = 0;
};

class ReachEnv : public EnvInterface {
 public:
  ReachEnv(ArmModel model, SimConfig sim, PDGains gains, EpisodeConfig episode,
           RewardWeights weights, CurriculumRegion region, uint64_t seed);

  int obs_dim() const override;
  int act_dim() const override { return model_.dof(); }
  void reseed(uint64_t seed) override { rng_.reseed(seed); }

  // index tells the env whether the abort reset is active under
  // AbortScope::kFirstRegionOnly.
  void set_region(const CurriculumRegion& region, int region_index);

  VecX begin_episode() override;
  StepResult step(const VecX& action) override;

  // Evaluation protocols drive goals/obstacles explicitly: resets the step
  // counter and the running command without sampling anything.
  void start_trial();
  // Applies a raw torque for one tick, bypassing the action clamp and the PD
  // loop; used by the analytic operational-space baselines.
  StepResult step_torque(const VecX& tau);

  // s = [dx, q, qdot(, d_1..d_n)] for the current state.
  VecX observation() const;

  const RobotState& state() const { return state_; }
  void set_state(const RobotState& state);
  const Vec3& goal() const { return goal_; }
  void set_goal(const Vec3& goal);
  const ObstacleSet& obstacles() const { return obstacles_; }
  void set_obstacles(const ObstacleSet& set);
  const ArmModel& model() const { return model_; }
  const CurriculumRegion& region() const { return region_; }
  const EpisodeConfig& episode_config() const { return episode_; }
  const SimConfig& sim_config() const { return sim_; }
  const DistanceVectors& distances() const { return distances_; }
  double error() const;
  int steps() const { return steps_; }

 private:
  void refresh_distances();
  bool abort_active() const;

  ArmModel model_;
  SimConfig sim_;
  PDGains gains_;
  EpisodeConfig episode_;
  RewardWeights weights_;
  CurriculumRegion region_;
  int region_index_ = 0;
  Rng rng_;

  RobotState state_;
  JointCommand command_;
  Vec3 goal_ = Vec3::Zero();
  ObstacleSet obstacles_;
  DistanceVectors distances_;
  int steps_ = 0;
  bool first_episode_ = true;
  bool last_episode_aborted_ = false;
};

}  // namespace reachlab
