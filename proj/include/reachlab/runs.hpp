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

// Config-driven entry points behind the CLI and the C API: training,
// policy/baseline evaluation, obstacle ablations, single-reach demos and the
// curriculum ablation.  Artifacts (metrics JSON, episode JSONL, checkpoints,
// trace/series CSV) land under an output directory when one is given.

#include <string>

#include "reachlab/run_config.hpp"

namespace reachlab {

struct TrainRunResult {
  std::string final_checkpoint_path;
  int reached_region = 0;   // 1-based
  double last_avg_error = 0.0;
  double last_success_rate = 0.0;
  std::string summary_json;
};

TrainRunResult run_train(const std::string& config_path, const std::string& out_dir,
                         uint64_t seed, int workers,
                         const std::string& resume_checkpoint = "",
                         const std::string& transfer_checkpoint = "");

// Learned-policy evaluation over the final curriculum region.
EvalOutcome run_eval(const RunConfig& cfg, const GaussianPolicy& policy, uint64_t seed,
                     int workers, const std::string& out_dir);
EvalOutcome run_eval(const std::string& config_path, const std::string& checkpoint,
                     uint64_t seed, int workers, const std::string& out_dir);

// controller is "osc-v" or "osc-a".
EvalOutcome run_baseline(const std::string& config_path, const std::string& controller,
                         uint64_t seed, int workers, const std::string& out_dir);

// Obstacle scenes with `obstacle_count` spheres per trial; when replay_scenes
// is non-empty the recorded scenes are rerun exactly (same starts, goals and
// obstacles), which is how the obstacle-unaware comparison stays paired.
EvalOutcome run_obstacle_eval(const std::string& config_path,
                              const std::string& checkpoint, int obstacle_count,
                              uint64_t seed, int workers, const std::string& out_dir,
                              const std::string& replay_scenes = "");

std::vector<SceneRecord> load_scenes(const std::string& path);

double run_demo_cmd(const std::string& config_path, const std::string& checkpoint,
                    const VecX& start_q, const Vec3& goal,
                    const std::string& trace_csv_path);

struct AblationResult {
  double curriculum_success = 0.0;     // seed-averaged
  double no_curriculum_success = 0.0;
  double gap = 0.0;
  std::string summary_json;
};

// Twin runs per seed at equal update budgets: the configured curriculum
// versus the final region alone.  Writes per-region error series CSVs and a
// comparison table under out_dir.
AblationResult run_ablation(const std::string& config_path, const std::string& out_dir,
                            uint64_t seed, int workers);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace reachlab
