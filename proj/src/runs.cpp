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

#include "reachlab/runs.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace reachlab {
namespace fs = std::filesystem;

namespace {

void write_trials_jsonl(const std::string& path, const std::vector<TrialRecord>& trials) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  for (const auto& t : trials) out << t.to_json() << "\n";
}

void write_scenes_jsonl(const std::string& path, const std::vector<SceneRecord>& scenes) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  for (const auto& s : scenes) out << s.to_json() << "\n";
}

void write_eval_artifacts(const std::string& out_dir, const std::string& prefix,
                          const EvalOutcome& outcome) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / (prefix + "_metrics.json")).string(),
                  outcome.table.to_json() + "\n");
  write_text_file((fs::path(out_dir) / (prefix + "_table.txt")).string(),
                  outcome.table.to_text());
  write_trials_jsonl((fs::path(out_dir) / (prefix + "_episodes.jsonl")).string(),
                     outcome.trials);
  write_scenes_jsonl((fs::path(out_dir) / (prefix + "_scenes.jsonl")).string(),
                     outcome.scenes);
}

EvalRun make_eval_run(const RunConfig& cfg, uint64_t seed, int workers) {
  EvalRun run;
  run.model = cfg.model;
  run.sim = cfg.sim;
  run.gains = cfg.pd;
  run.episode = cfg.episode;
  run.weights = cfg.reward;
  run.region = cfg.curriculum.regions.back();
  run.settings = cfg.eval;
  run.seed = seed;
  run.workers = workers;
  return run;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << content;
}

TrainRunResult run_train(const std::string& config_path, const std::string& out_dir,
                         uint64_t seed, int workers,
                         const std::string& resume_checkpoint,
                         const std::string& transfer_checkpoint) {
  const RunConfig cfg = load_run_config(config_path);
  TrainerOptions opt = cfg.trainer_options(seed, workers, out_dir);
  opt.resume_checkpoint = resume_checkpoint;
  opt.transfer_checkpoint = transfer_checkpoint;
  Trainer trainer(cfg.model, cfg.sim, cfg.pd, cfg.episode, cfg.reward, cfg.curriculum,
                  cfg.ppo, opt);
  const TrainResult res = trainer.run();

  TrainRunResult out;
  out.final_checkpoint_path = res.final_checkpoint_path;
  out.reached_region = res.reached_region + 1;
  out.last_avg_error = res.last_avg_error;
  out.last_success_rate = res.last_success_rate;
  nlohmann::ordered_json j;
  j["updates"] = res.metrics.empty() ? 0 : res.metrics.back().update;
  j["reached_region"] = out.reached_region;
  j["last_avg_error_m"] =
      std::isnan(res.last_avg_error) ? nlohmann::json() : nlohmann::json(res.last_avg_error);
  j["last_success_rate"] = std::isnan(res.last_success_rate)
                               ? nlohmann::json()
                               : nlohmann::json(res.last_success_rate);
  j["checkpoint"] = res.final_checkpoint_path;
  out.summary_json = j.dump();
  if (!out_dir.empty())
    write_text_file((fs::path(out_dir) / "train_summary.json").string(),
                    out.summary_json + "\n");
  return out;
}

EvalOutcome run_eval(const RunConfig& cfg, const GaussianPolicy& policy, uint64_t seed,
                     int workers, const std::string& out_dir) {
  EvalRun run = make_eval_run(cfg, seed, workers);
  run.controller.kind = EvalController::Kind::kPolicy;
  run.controller.policy = &policy;
  EvalOutcome outcome = run_reach_eval(run);
  write_eval_artifacts(out_dir, "eval", outcome);
  return outcome;
}

EvalOutcome run_eval(const std::string& config_path, const std::string& checkpoint,
                     uint64_t seed, int workers, const std::string& out_dir) {
  const RunConfig cfg = load_run_config(config_path);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  // Evaluation environments observe what the policy was trained on.
  RunConfig adjusted = cfg;
  const int n = cfg.model.dof();
  if (ckpt.policy.obs_dim() == 3 + 2 * n) {
    adjusted.episode.obstacles.enabled = false;
  } else if (ckpt.policy.obs_dim() == 3 + 5 * n) {
    adjusted.episode.obstacles.enabled = true;
    adjusted.episode.obstacles.observe = true;
  } else {
    fail(ErrorCode::kInvalidArgument,
         "checkpoint observation dimension does not match the model");
  }
  check_arg(ckpt.policy.act_dim() == n,
            "checkpoint action dimension does not match the model");
  return run_eval(adjusted, ckpt.policy, seed, workers, out_dir);
}

EvalOutcome run_baseline(const std::string& config_path, const std::string& controller,
                         uint64_t seed, int workers, const std::string& out_dir) {
  const RunConfig cfg = load_run_config(config_path);
  EvalRun run = make_eval_run(cfg, seed, workers);
  if (controller == "osc-v") {
    run.controller.kind = EvalController::Kind::kOscV;
    run.controller.task_gains = cfg.osc.gains_v;
  } else if (controller == "osc-a") {
    run.controller.kind = EvalController::Kind::kOscA;
    run.controller.task_gains = cfg.osc.gains_a;
  } else {
    fail(ErrorCode::kInvalidArgument,
         "unknown baseline controller '" + controller + "' (osc-v or osc-a)");
  }
  run.controller.nullspace = cfg.nullspace();
  EvalOutcome outcome = run_reach_eval(run);
  write_eval_artifacts(out_dir, "baseline_" + controller, outcome);
  return outcome;
}

std::vector<SceneRecord> load_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open scenes '" + path + "'");
  std::vector<SceneRecord> scenes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    SceneRecord s;
    const auto& q = j.at("start_q");
    s.start_q.resize(long(q.size()));
    for (size_t i = 0; i < q.size(); ++i) s.start_q[long(i)] = q[i].get<double>();
    const auto& g = j.at("goal");
    s.goal = Vec3(g[0].get<double>(), g[1].get<double>(), g[2].get<double>());
    for (const auto& sp : j.at("spheres")) {
      SphereObstacle o;
      const auto& c = sp.at("center");
      o.center = Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
      o.radius = sp.at("radius").get<double>();
      s.spheres.push_back(o);
    }
    scenes.push_back(std::move(s));
  }
  return scenes;
}

EvalOutcome run_obstacle_eval(const std::string& config_path,
                              const std::string& checkpoint, int obstacle_count,
                              uint64_t seed, int workers, const std::string& out_dir,
                              const std::string& replay_scenes) {
  check_arg(obstacle_count >= 1 && obstacle_count <= 3,
            "obstacle count must be in 1..3");
  const RunConfig cfg = load_run_config(config_path);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const int n = cfg.model.dof();
  check_arg(ckpt.policy.act_dim() == n,
            "checkpoint action dimension does not match the model");

  EvalRun run = make_eval_run(cfg, seed, workers);
  run.controller.kind = EvalController::Kind::kPolicy;
  run.controller.policy = &ckpt.policy;
  run.obstacle_count = obstacle_count;
  // The observation follows the checkpoint: obstacle-aware policies see the
  // distance block, plain reaching policies run blind on the same scenes.
  if (ckpt.policy.obs_dim() == 3 + 5 * n) {
    run.episode.obstacles.enabled = true;
    run.episode.obstacles.observe = true;
  } else if (ckpt.policy.obs_dim() == 3 + 2 * n) {
    run.episode.obstacles.enabled = false;
  } else {
    fail(ErrorCode::kInvalidArgument,
         "checkpoint observation dimension does not match the model");
  }

  std::vector<SceneRecord> replay;
  if (!replay_scenes.empty()) {
    replay = load_scenes(replay_scenes);
    check_arg(int(replay.size()) >= run.settings.trials,
              "replay scene file has fewer scenes than trials");
    replay.resize(size_t(run.settings.trials));
    run.replay = &replay;
  }

  EvalOutcome outcome = run_reach_eval(run);
  write_eval_artifacts(out_dir, "obstacle" + std::to_string(obstacle_count), outcome);
  return outcome;
}

double run_demo_cmd(const std::string& config_path, const std::string& checkpoint,
                    const VecX& start_q, const Vec3& goal,
                    const std::string& trace_csv_path) {
  const RunConfig cfg = load_run_config(config_path);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const int n = cfg.model.dof();
  check_arg(ckpt.policy.act_dim() == n,
            "checkpoint action dimension does not match the model");
  EpisodeConfig episode = cfg.episode;
  episode.obstacles.enabled = ckpt.policy.obs_dim() == 3 + 5 * n;
  const VecX q0 = start_q.size() ? start_q : cfg.episode.home_pose;
  check_arg(q0.size() == n, "start pose has wrong dimension");
  return run_demo(cfg.model, cfg.sim, cfg.pd, episode, cfg.reward, ckpt.policy, q0,
                  goal, cfg.eval.horizon_s, trace_csv_path);
}

AblationResult run_ablation(const std::string& config_path, const std::string& out_dir,
                            uint64_t seed, int workers) {
  const RunConfig cfg = load_run_config(config_path);
  if (!out_dir.empty()) fs::create_directories(out_dir);

  auto train_arm = [&](const CurriculumSchedule& schedule, uint64_t arm_seed,
                       const std::string& tag) {
    TrainerOptions opt = cfg.trainer_options(arm_seed, workers,
                                             out_dir.empty() ? "" : (fs::path(out_dir) / tag).string());
    opt.max_updates = cfg.ablation.updates;
    opt.eval_all_regions = true;
    Trainer trainer(cfg.model, cfg.sim, cfg.pd, cfg.episode, cfg.reward, schedule,
                    cfg.ppo, opt);
    return trainer.run();
  };

  CurriculumSchedule full_only = cfg.curriculum;
  full_only.regions = {cfg.curriculum.regions.back()};

  nlohmann::ordered_json summary;
  summary["seeds"] = cfg.ablation.seeds;
  summary["updates_per_arm"] = cfg.ablation.updates;
  auto& per_seed = summary["per_seed"] = nlohmann::json::array();

  double success_curr = 0.0, success_none = 0.0;
  for (int s = 0; s < cfg.ablation.seeds; ++s) {
    const uint64_t arm_seed = mix_seed(seed, 0x900 + uint64_t(s));
    const std::string tag = "seed" + std::to_string(s);
    const TrainResult curr = train_arm(cfg.curriculum, arm_seed, tag + "_curriculum");
    const TrainResult none = train_arm(full_only, arm_seed, tag + "_nocurriculum");

    // Error-vs-updates series, one column per region of the full curriculum.
    auto write_series = [&](const TrainResult& res, const std::string& name,
                            size_t region_count) {
      if (out_dir.empty()) return;
      std::ostringstream csv;
      csv << "update,trained_region";
      for (size_t r = 1; r <= region_count; ++r) csv << ",err_region" << r;
      csv << "\n";
      for (const auto& row : res.metrics) {
        if (row.region_errors.empty()) continue;
        csv << row.update << "," << row.region;
        for (double e : row.region_errors) csv << "," << e;
        csv << "\n";
      }
      write_text_file((fs::path(out_dir) / name).string(), csv.str());
    };
    write_series(curr, tag + "_curriculum_series.csv", cfg.curriculum.regions.size());
    write_series(none, tag + "_nocurriculum_series.csv", 1);

    // Final evaluation of both arms on the full region.
    const EvalOutcome eval_curr = run_eval(cfg, curr.final_checkpoint.policy,
                                           mix_seed(arm_seed, 0xE1), workers, "");
    const EvalOutcome eval_none = run_eval(cfg, none.final_checkpoint.policy,
                                           mix_seed(arm_seed, 0xE1), workers, "");
    success_curr += eval_curr.table.success_rate;
    success_none += eval_none.table.success_rate;
    nlohmann::ordered_json row;
    row["seed"] = arm_seed;
    row["curriculum_success"] = eval_curr.table.success_rate;
    row["curriculum_avg_error_m"] = eval_curr.table.average_error_all_m;
    row["no_curriculum_success"] = eval_none.table.success_rate;
    row["no_curriculum_avg_error_m"] = eval_none.table.average_error_all_m;
    per_seed.push_back(row);
  }
  success_curr /= double(cfg.ablation.seeds);
  success_none /= double(cfg.ablation.seeds);

  AblationResult out;
  out.curriculum_success = success_curr;
  out.no_curriculum_success = success_none;
  out.gap = success_curr - success_none;
  summary["curriculum_success"] = success_curr;
  summary["no_curriculum_success"] = success_none;
  summary["gap"] = out.gap;
  out.summary_json = summary.dump();

  if (!out_dir.empty()) {
    write_text_file((fs::path(out_dir) / "ablation_summary.json").string(),
                    out.summary_json + "\n");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "curriculum     success %.4f\nno-curriculum  success %.4f\ngap %.4f\n",
                  success_curr, success_none, out.gap);
    write_text_file((fs::path(out_dir) / "ablation_table.txt").string(), buf);
  }
  return out;
}

}  // namespace reachlab
