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

#include "reachlab/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "reachlab/threading.hpp"

namespace reachlab {
namespace {

std::string jnum(double v) {
  if (std::isnan(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string jvec3(const Vec3& v) {
  return "[" + jnum(v.x()) + "," + jnum(v.y()) + "," + jnum(v.z()) + "]";
}

struct ChainContext {
  std::unique_ptr<ReachEnv> env;
  std::unique_ptr<OscVController> osc_v;
  std::unique_ptr<OscAController> osc_a;
  Rng rng;

  ChainContext() : rng(0) {}
};

}  // namespace

std::string TrialRecord::to_json() const {
  std::string s = "{\"episode\":" + std::to_string(episode) +
                  ",\"start\":" + jvec3(start) + ",\"goal\":" + jvec3(goal) +
                  ",\"final_error_m\":" + jnum(final_error_m) +
                  ",\"settled\":" + (settled ? "true" : "false") +
                  ",\"steps\":" + std::to_string(steps) +
                  ",\"aborted\":" + (aborted ? "true" : "false") +
                  ",\"collisions\":" + std::to_string(collisions);
  if (settled) s += ",\"completion_s\":" + jnum(completion_s);
  if (faulted) s += ",\"faulted\":true";
  return s + "}";
}

std::string SceneRecord::to_json() const {
  std::string s = "{\"start_q\":[";
  for (long i = 0; i < start_q.size(); ++i) {
    if (i) s += ',';
    s += jnum(start_q[i]);
  }
  s += "],\"goal\":" + jvec3(goal) + ",\"spheres\":[";
  for (size_t i = 0; i < spheres.size(); ++i) {
    if (i) s += ',';
    s += "{\"center\":" + jvec3(spheres[i].center) +
         ",\"radius\":" + jnum(spheres[i].radius) + "}";
  }
  return s + "]}";
}

MetricsTable MetricsTable::from_trials(const std::vector<TrialRecord>& trials,
                                       double success_radius, bool with_collisions) {
  check_arg(!trials.empty(), "metrics require at least one trial");
  MetricsTable t;
  t.trials = static_cast<int>(trials.size());

  double err_settled = 0.0, err_all = 0.0;
  std::vector<double> completions;
  std::vector<double> grazing;
  int successes = 0, collision_free = 0;
  for (const auto& trial : trials) {
    err_all += trial.final_error_m;
    if (trial.settled) {
      ++t.settled_count;
      err_settled += trial.final_error_m;
    }
    const bool success = trial.settled && trial.final_error_m < success_radius;
    if (success) {
      ++successes;
      completions.push_back(trial.completion_s);
    }
    if (trial.collision_free) ++collision_free;
    grazing.insert(grazing.end(), trial.grazing_ratios.begin(),
                   trial.grazing_ratios.end());
  }

  t.success_rate = double(successes) / double(t.trials);
  t.average_error_all_m = err_all / double(t.trials);
  if (t.settled_count > 0) t.average_error_m = err_settled / double(t.settled_count);
  if (!completions.empty()) {
    double mean = 0.0;
    for (double c : completions) mean += c;
    mean /= double(completions.size());
    double var = 0.0;
    for (double c : completions) var += (c - mean) * (c - mean);
    var /= double(completions.size());
    t.completion_mean_s = mean;
    t.completion_std_s = std::sqrt(var);
  }
  if (with_collisions) {
    t.collision_free_rate = double(collision_free) / double(t.trials);
    if (!grazing.empty()) {
      double mean = 0.0;
      for (double g : grazing) mean += g;
      mean /= double(grazing.size());
      double var = 0.0;
      for (double g : grazing) var += (g - mean) * (g - mean);
      var /= double(grazing.size());
      t.grazing_mean = mean;
      t.grazing_std = std::sqrt(var);
    }
  }
  return t;
}

std::string MetricsTable::to_json() const {
  return std::string("{") + "\"trials\":" + std::to_string(trials) +
         ",\"settled\":" + std::to_string(settled_count) +
         ",\"success_rate\":" + jnum(success_rate) +
         ",\"average_error_m\":" + jnum(average_error_m) +
         ",\"average_error_all_m\":" + jnum(average_error_all_m) +
         ",\"completion_mean_s\":" + jnum(completion_mean_s) +
         ",\"completion_std_s\":" + jnum(completion_std_s) +
         ",\"collision_free_rate\":" + jnum(collision_free_rate) +
         ",\"grazing_mean\":" + jnum(grazing_mean) +
         ",\"grazing_std\":" + jnum(grazing_std) + "}";
}

std::string MetricsTable::to_text() const {
  std::ostringstream out;
  char buf[96];
  std::snprintf(buf, sizeof buf, "trials               %d\n", trials);
  out << buf;
  std::snprintf(buf, sizeof buf, "settled              %d\n", settled_count);
  out << buf;
  std::snprintf(buf, sizeof buf, "success_rate         %.4f\n", success_rate);
  out << buf;
  std::snprintf(buf, sizeof buf, "average_error_m      %.6f\n", average_error_m);
  out << buf;
  std::snprintf(buf, sizeof buf, "average_error_all_m  %.6f\n", average_error_all_m);
  out << buf;
  std::snprintf(buf, sizeof buf, "completion_mean_s    %.4f\n", completion_mean_s);
  out << buf;
  std::snprintf(buf, sizeof buf, "completion_std_s     %.4f\n", completion_std_s);
  out << buf;
  if (!std::isnan(collision_free_rate)) {
    std::snprintf(buf, sizeof buf, "collision_free_rate  %.4f\n", collision_free_rate);
    out << buf;
    std::snprintf(buf, sizeof buf, "grazing_mean         %.4f\n", grazing_mean);
    out << buf;
    std::snprintf(buf, sizeof buf, "grazing_std          %.4f\n", grazing_std);
    out << buf;
  }
  return out.str();
}

EvalOutcome run_reach_eval(const EvalRun& run) {
  check_arg(run.settings.trials > 0, "need at least one trial");
  check_arg(run.settings.success_radius > 0, "success radius must be positive");
  const int chains = std::max(1, std::min(run.settings.chains, run.settings.trials));
  const int horizon_ticks =
      std::max(1, int(std::lround(run.settings.horizon_s / run.sim.dt)));
  const int window_ticks =
      std::max(1, int(std::lround(run.settings.settle_window_s / run.sim.dt)));

  // Evaluation never resets to home on abort; the flag is still reported.
  EpisodeConfig episode = run.episode;
  episode.abort_scope = AbortScope::kNone;
  episode.horizon_steps = horizon_ticks;
  episode.obstacles.enabled = false;  // scenes are placed explicitly below

  std::vector<TrialRecord> trials(static_cast<size_t>(run.settings.trials));
  std::vector<SceneRecord> scenes(static_cast<size_t>(run.settings.trials));

  parallel_for(chains, run.workers, [&](int c) {
    ChainContext ctx;
    ctx.env = std::make_unique<ReachEnv>(run.model, run.sim, run.gains, episode,
                                         run.weights, run.region,
                                         mix_seed(run.seed, 0x600 + uint64_t(c)));
    ctx.rng.reseed(mix_seed(run.seed, 0x700 + uint64_t(c)));
    if (run.controller.kind == EvalController::Kind::kOscV)
      ctx.osc_v = std::make_unique<OscVController>(run.controller.task_gains,
                                                   run.controller.nullspace, run.sim.dt);
    if (run.controller.kind == EvalController::Kind::kOscA)
      ctx.osc_a = std::make_unique<OscAController>(run.controller.task_gains,
                                                   run.controller.nullspace);

    for (int i = c; i < run.settings.trials; i += chains) {
      ReachEnv& env = *ctx.env;
      TrialRecord rec;
      rec.episode = i;

      if (run.replay) {
        const SceneRecord& scene = (*run.replay)[size_t(i)];
        RobotState s = RobotState::zero(run.model.dof());
        s.q = scene.start_q;
        env.set_state(s);
        env.set_goal(scene.goal);
        ObstacleSet set;
        set.spheres = scene.spheres;
        env.set_obstacles(set);
      } else {
        const Vec3 start_ee = ee_position(run.model, env.state().q);
        const Vec3 goal = sample_goal(run.region, ctx.rng);
        env.set_goal(goal);
        ObstacleSet set;
        if (run.obstacle_count > 0) {
          const auto arm = link_sphere_centers(run.model, env.state().q);
          set = place_obstacles(run.region, start_ee, goal, run.obstacle_count,
                                episode.obstacles.radius, episode.obstacles.clearance,
                                ctx.rng, &arm);
        }
        env.set_obstacles(set);
      }
      env.start_trial();

      SceneRecord scene;
      scene.start_q = env.state().q;
      scene.goal = env.goal();
      scene.spheres = env.obstacles().spheres;
      scenes[size_t(i)] = scene;
      rec.start = ee_position(run.model, env.state().q);
      rec.goal = env.goal();

      GrazingTracker grazing(env.distances().per_link.size());
      if (!env.obstacles().empty()) grazing.observe(env.distances());
      int quiet_ticks = 0;
      rec.final_error_m = env.error();

      if (run.controller.kind == EvalController::Kind::kOscV) ctx.osc_v->reset();

      for (int t = 0; t < horizon_ticks; ++t) {
        StepResult res;
        try {
          switch (run.controller.kind) {
            case EvalController::Kind::kPolicy: {
              const GaussianPolicy& pol = *run.controller.policy;
              res = env.step(pol.mean_action(pol.normalize(env.observation())));
              break;
            }
            case EvalController::Kind::kOscV: {
              TaskTarget target;
              target.x_d = env.goal();
              res = env.step_torque(
                  ctx.osc_v->step(run.model, env.state(), target).tau);
              break;
            }
            case EvalController::Kind::kOscA: {
              TaskTarget target;
              target.x_d = env.goal();
              res = env.step_torque(
                  ctx.osc_a->step(run.model, env.state(), target).tau);
              break;
            }
          }
        } catch (const Error&) {
          rec.faulted = true;  // singular dynamics or runaway torques
          break;
        }
        if (!env.state().q.allFinite() || !env.state().qdot.allFinite()) {
          rec.faulted = true;
          break;
        }
        rec.steps = t + 1;
        rec.final_error_m = res.info.error_m;
        rec.aborted = rec.aborted || res.info.abort;
        if (!env.obstacles().empty()) {
          grazing.observe(env.distances());
          if (res.info.min_separation < 0.0) rec.collision_free = false;
        }
        quiet_ticks = env.state().qdot.cwiseAbs().maxCoeff() < run.settings.settle_velocity
                          ? quiet_ticks + 1
                          : 0;
        if (quiet_ticks >= window_ticks) {
          rec.settled = true;
          rec.completion_s = (t + 1) * run.sim.dt;
          break;
        }
      }
      rec.collisions = grazing.touch_events();
      if (rec.collisions > 0) rec.collision_free = false;
      rec.grazing_ratios = grazing.ratios();
      trials[size_t(i)] = rec;
    }
  });

  EvalOutcome out;
  out.trials = std::move(trials);
  out.scenes = std::move(scenes);
  out.table = MetricsTable::from_trials(out.trials, run.settings.success_radius,
                                        run.obstacle_count > 0 || run.replay != nullptr);
  return out;
}

double run_demo(const ArmModel& model, const SimConfig& sim, const PDGains& gains,
                const EpisodeConfig& episode, const RewardWeights& weights,
                const GaussianPolicy& policy, const VecX& start_q, const Vec3& goal,
                double horizon_s, const std::string& trace_csv_path) {
  EpisodeConfig ep = episode;
  ep.abort_scope = AbortScope::kNone;
  ep.obstacles.enabled = false;
  CurriculumRegion everywhere =
      CurriculumRegion::box(Vec3::Zero(), Vec3::Constant(model.max_reach()));
  ReachEnv env(model, sim, gains, ep, weights, everywhere, 0);
  RobotState s = RobotState::zero(model.dof());
  s.q = model.clamp_to_limits(start_q);
  env.set_state(s);
  env.set_goal(goal);
  env.start_trial();

  std::ofstream out(trace_csv_path);
  if (!out) fail(ErrorCode::kIo, "cannot write trace '" + trace_csv_path + "'");
  TraceWriter trace(out, model.dof());
  trace.record(0.0, env.state(), ee_position(model, env.state().q), env.error());

  const int ticks = std::max(1, int(std::lround(horizon_s / sim.dt)));
  double err = env.error();
  for (int t = 0; t < ticks; ++t) {
    const StepResult res =
        env.step(policy.mean_action(policy.normalize(env.observation())));
    err = res.info.error_m;
    trace.record((t + 1) * sim.dt, env.state(), ee_position(model, env.state().q), err);
  }
  return err;
}

}  // namespace reachlab
