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

// Training loop: alternate rollout collection over parallel environments
// with PPO updates, periodically measure the settled reaching error, advance
// the curriculum, and write checkpoints plus a JSONL metrics log.  A frozen
// policy snapshot drives each collection phase; updates are single-writer.
// Per-update rng substreams are derived from (seed, update, env), so a fixed
// seed with workers = 1 is bit-deterministic and resumed runs consume the
// same streams the original would have.

#include <memory>
#include <string>

#include "reachlab/ppo.hpp"
#include "reachlab/reach_env.hpp"

namespace reachlab {

struct EnvSlot {
  std::unique_ptr<EnvInterface> env;
  VecX obs_raw;
  bool episode_active = false;
};

// Collects E x H transitions; environments auto-begin new episodes on
// episode end.  Substreams: goal/obstacle rng mix(seed, 0x100+e, update),
// action rng mix(seed, 0x200+e, update).  Environment faults abort the
// collection with the env index in the message.
RolloutBatch collect_rollouts(std::vector<EnvSlot>& envs, const GaussianPolicy& policy,
                              int horizon, uint64_t seed, uint64_t update_index,
                              int workers);

struct SettleParams {
  double velocity = 0.05;  // rad/s, infinity norm on qdot
  double window_s = 0.5;
};

struct SettledEvalResult {
  double avg_error = 0.0;    // mean error at first settle (or at episode end)
  double success_rate = 0.0; // settled with error < radius
  int episodes = 0;
};

// Runs `episodes` sequential eval episodes with the mean action; each ends
// at its first settle instant or at the episode horizon.
SettledEvalResult evaluate_settled_error(ReachEnv& env, const GaussianPolicy& policy,
                                         int episodes, const SettleParams& settle,
                                         double success_radius);

struct MetricsRow {
  long update = 0;
  int region = 0;   // 1-based in logs
  double reward_mean = 0.0;
  double avg_error_m = std::numeric_limits<double>::quiet_NaN();
  double success_rate = std::numeric_limits<double>::quiet_NaN();
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;
  std::vector<double> region_errors;  // filled when eval_all_regions is on

  std::string to_json() const;
};

struct TrainerOptions {
  int max_updates = 500;
  uint64_t seed = 1;
  int workers = 1;
  std::string out_dir;                 // empty: keep artifacts in memory only
  double success_radius = 0.01;        // for the logged success_rate
  SettleParams settle;
  bool eval_all_regions = false;       // per-region error series (fig-4 data)
  std::vector<int> hidden = {128, 128};
  double init_std_fraction = 0.5;      // initial policy std relative to action scale
  std::string resume_checkpoint;       // continue counters/weights
  std::string transfer_checkpoint;     // widen a pretrained policy to this env
  bool quiet = true;
};

struct TrainResult {
  Checkpoint final_checkpoint;
  std::vector<MetricsRow> metrics;
  int reached_region = 0;  // 0-based index of the region training ended in
  double last_avg_error = std::numeric_limits<double>::quiet_NaN();
  double last_success_rate = std::numeric_limits<double>::quiet_NaN();
  std::string final_checkpoint_path;
};

class Trainer {
 public:
  Trainer(ArmModel model, SimConfig sim, PDGains gains, EpisodeConfig episode,
          RewardWeights weights, CurriculumSchedule schedule, PpoConfig ppo,
          TrainerOptions options);

  TrainResult run();

 private:
  ArmModel model_;
  SimConfig sim_;
  PDGains gains_;
  EpisodeConfig episode_;
  RewardWeights weights_;
  CurriculumSchedule schedule_;
  PpoConfig ppo_;
  TrainerOptions options_;
};

}  // namespace reachlab
