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

// Run configuration: one hierarchical text file describing the model,
// simulation, episode, reward, curriculum, PPO, evaluation and baseline
// settings for a run.  The schema is documented in docs/file-formats.md.

#include <string>

#include "reachlab/evaluation.hpp"
#include "reachlab/trainer.hpp"

namespace reachlab {

struct OscSettings {
  TaskGains gains_v;  // kappa_p for the velocity controller
  TaskGains gains_a;  // kappa_p/kappa_d for the acceleration controller
  double nullspace_stiffness = 0.0;
  VecX rest_pose;     // defaults to the home pose
};

struct AblationSettings {
  int seeds = 3;
  int updates = 160;  // per arm, equal budgets
};

struct RunConfig {
  std::string model_path;
  ArmModel model;
  SimConfig sim;
  PDGains pd;
  EpisodeConfig episode;
  RewardWeights reward;
  CurriculumSchedule curriculum;
  PpoConfig ppo;
  int updates = 500;
  std::vector<int> hidden = {128, 128};
  double init_std_fraction = 0.5;
  EvalSettings eval;
  OscSettings osc;
  AblationSettings ablation;

  NullSpaceObjective nullspace() const {
    NullSpaceObjective ns;
    ns.rest_pose = osc.rest_pose.size() ? osc.rest_pose : episode.home_pose;
    ns.stiffness = osc.nullspace_stiffness;
    return ns;
  }
  TrainerOptions trainer_options(uint64_t seed, int workers,
                                 const std::string& out_dir) const;
};

// Parse errors carry file and line context.
RunConfig load_run_config(const std::string& path);

}  // namespace reachlab
