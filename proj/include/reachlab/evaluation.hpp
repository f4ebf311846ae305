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

// Evaluation protocol shared by learned policies and the analytic baselines.
// Goals are sampled sequentially (each trial starts where the previous one
// settled); a trial succeeds when the arm settles (joint speeds below the
// threshold for a sustained window) with final error inside the success
// radius before the horizon.  Trials are striped over a fixed number of
// logical chains so results depend only on the seed, not the worker count.

#include <optional>
#include <string>
#include <vector>

#include "reachlab/osc.hpp"
#include "reachlab/policy.hpp"
#include "reachlab/reach_env.hpp"

namespace reachlab {

struct EvalSettings {
  int trials = 350;
  double success_radius = 0.01;   // m
  double horizon_s = 30.0;        // per trial
  double settle_velocity = 0.05;  // rad/s
  double settle_window_s = 0.5;
  int chains = 8;                 // logical sequential-goal chains
};

struct TrialRecord {
  int episode = 0;
  Vec3 start = Vec3::Zero();  // end-effector at trial start
  Vec3 goal = Vec3::Zero();
  double final_error_m = 0.0;
  bool settled = false;
  double completion_s = 0.0;  // first settled instant; valid when settled
  int steps = 0;
  bool aborted = false;       // abort-distance flag seen during the trial
  bool faulted = false;       // non-finite state / singular dynamics
  int collisions = 0;         // first-touch events
  bool collision_free = true; // no penetration at any tick
  std::vector<double> grazing_ratios;

  std::string to_json() const;
};

struct MetricsTable {
  int trials = 0;
  int settled_count = 0;
  double success_rate = 0.0;
  double average_error_m = std::numeric_limits<double>::quiet_NaN();      // settled only
  double average_error_all_m = std::numeric_limits<double>::quiet_NaN();  // every trial
  double completion_mean_s = std::numeric_limits<double>::quiet_NaN();    // successes
  double completion_std_s = std::numeric_limits<double>::quiet_NaN();
  double collision_free_rate = std::numeric_limits<double>::quiet_NaN();
  double grazing_mean = std::numeric_limits<double>::quiet_NaN();
  double grazing_std = std::numeric_limits<double>::quiet_NaN();

  // Errors on zero trials.
  static MetricsTable from_trials(const std::vector<TrialRecord>& trials,
                                  double success_radius, bool with_collisions);
  std::string to_json() const;
  std::string to_text() const;
};

struct SceneRecord {
  VecX start_q;
  Vec3 goal = Vec3::Zero();
  std::vector<SphereObstacle> spheres;

  std::string to_json() const;
};

struct EvalController {
  enum class Kind { kPolicy, kOscV, kOscA };
  Kind kind = Kind::kPolicy;
  const GaussianPolicy* policy = nullptr;  // kPolicy
  TaskGains task_gains;                    // OSC baselines
  NullSpaceObjective nullspace;
};

struct EvalRun {
  ArmModel model;
  SimConfig sim;
  PDGains gains;
  EpisodeConfig episode;   // obstacle fields used when obstacle_count > 0
  RewardWeights weights;
  CurriculumRegion region;
  EvalController controller;
  EvalSettings settings;
  uint64_t seed = 0;
  int workers = 1;
  int obstacle_count = 0;                   // spheres per trial
  const std::vector<SceneRecord>* replay = nullptr;  // exact scene replay
};

struct EvalOutcome {
  MetricsTable table;
  std::vector<TrialRecord> trials;
  std::vector<SceneRecord> scenes;  // in trial order; replayable
};

EvalOutcome run_reach_eval(const EvalRun& run);

// Single reach from a given start toward a goal, writing the trajectory
// trace CSV; returns the final error.
double run_demo(const ArmModel& model, const SimConfig& sim, const PDGains& gains,
                const EpisodeConfig& episode, const RewardWeights& weights,
                const GaussianPolicy& policy, const VecX& start_q, const Vec3& goal,
                double horizon_s, const std::string& trace_csv_path);

}  // namespace reachlab
