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

#include "reachlab/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "reachlab/threading.hpp"

namespace reachlab {
namespace {

std::string json_number(double v) {
  if (std::isnan(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string MetricsRow::to_json() const {
  std::string s = "{\"update\":" + std::to_string(update) +
                  ",\"region\":" + std::to_string(region) +
                  ",\"reward_mean\":" + json_number(reward_mean) +
                  ",\"avg_error_m\":" + json_number(avg_error_m) +
                  ",\"success_rate\":" + json_number(success_rate) +
                  ",\"policy_loss\":" + json_number(policy_loss) +
                  ",\"value_loss\":" + json_number(value_loss) +
                  ",\"clip_fraction\":" + json_number(clip_fraction) +
                  ",\"kl\":" + json_number(kl);
  if (!region_errors.empty()) {
    s += ",\"region_errors\":[";
    for (size_t i = 0; i < region_errors.size(); ++i) {
      if (i) s += ',';
      s += json_number(region_errors[i]);
    }
    s += ']';
  }
  return s + "}";
}

RolloutBatch collect_rollouts(std::vector<EnvSlot>& envs, const GaussianPolicy& policy,
                              int horizon, uint64_t seed, uint64_t update_index,
                              int workers) {
  check_arg(!envs.empty() && horizon > 0, "need at least one env and one step");
  const int env_count = static_cast<int>(envs.size());
  const int obs_dim = envs[0].env->obs_dim();
  const int act_dim = envs[0].env->act_dim();

  RolloutBatch batch;
  batch.envs = env_count;
  batch.steps = horizon;
  const long total = batch.size();
  batch.obs_norm.resize(obs_dim, total);
  batch.obs_raw.resize(obs_dim, total);
  batch.actions.resize(act_dim, total);
  batch.log_probs.resize(total);
  batch.rewards.resize(total);
  batch.values.resize(total);
  batch.next_values.resize(total);
  batch.done.assign(size_t(total), 0);
  batch.terminal.assign(size_t(total), 0);
  batch.info_error.resize(total);
  batch.info_qddot_norm.resize(total);
  batch.info_psi_sum.resize(total);

  parallel_for(env_count, workers, [&](int e) {
    EnvSlot& slot = envs[size_t(e)];
    slot.env->reseed(mix_seed(seed, 0x100 + uint64_t(e), update_index));
    Rng action_rng(mix_seed(seed, 0x200 + uint64_t(e), update_index));
    try {
      for (int t = 0; t < horizon; ++t) {
        if (!slot.episode_active) {
          slot.obs_raw = slot.env->begin_episode();
          slot.episode_active = true;
        }
        const long at = batch.index(e, t);
        const VecX obs_norm = policy.normalize(slot.obs_raw);
        const GaussianSample sample = policy.sample(obs_norm, action_rng);
        const StepResult res = slot.env->step(sample.action);

        batch.obs_raw.col(at) = slot.obs_raw;
        batch.obs_norm.col(at) = obs_norm;
        batch.actions.col(at) = sample.action;
        batch.log_probs[at] = sample.log_prob;
        batch.values[at] = policy.value(obs_norm);
        batch.rewards[at] = res.rew;
        batch.done[size_t(at)] = res.done ? 1 : 0;
        batch.terminal[size_t(at)] = res.terminal ? 1 : 0;
        batch.info_error[at] = res.info.error_m;
        batch.info_qddot_norm[at] = res.info.qddot_norm;
        batch.info_psi_sum[at] = res.info.psi_sum;

        if (res.done) {
          batch.next_values[at] =
              res.terminal ? 0.0 : policy.value(policy.normalize(res.observation));
          slot.episode_active = false;
        } else {
          slot.obs_raw = res.observation;
          batch.next_values[at] = 0.0;  // patched below from values[t+1]
        }
      }
      // V(s_{t+1}) for steps that continue inside the batch, and the final
      // bootstrap for a collection phase ending mid-episode.
      for (int t = 0; t < horizon; ++t) {
        const long at = batch.index(e, t);
        if (batch.done[size_t(at)]) continue;
        if (t + 1 < horizon)
          batch.next_values[at] = batch.values[batch.index(e, t + 1)];
        else
          batch.next_values[at] = policy.value(policy.normalize(slot.obs_raw));
      }
    } catch (const Error& err) {
      fail(err.code(), "env " + std::to_string(e) + ": " + err.what());
    }
  });
  return batch;
}

SettledEvalResult evaluate_settled_error(ReachEnv& env, const GaussianPolicy& policy,
                                         int episodes, const SettleParams& settle,
                                         double success_radius) {
  SettledEvalResult out;
  out.episodes = episodes;
  double error_sum = 0.0;
  int successes = 0;
  const int window_ticks =
      std::max(1, int(std::lround(settle.window_s / env.sim_config().dt)));
  for (int ep = 0; ep < episodes; ++ep) {
    env.begin_episode();
    int quiet_ticks = 0;
    bool settled = false;
    double final_error = env.error();
    while (true) {
      const VecX obs_norm = policy.normalize(env.observation());
      const StepResult res = env.step(policy.mean_action(obs_norm));
      final_error = res.info.error_m;
      quiet_ticks = env.state().qdot.cwiseAbs().maxCoeff() < settle.velocity
                        ? quiet_ticks + 1
                        : 0;
      if (quiet_ticks >= window_ticks) {
        settled = true;
        break;
      }
      if (res.done) break;
    }
    error_sum += final_error;
    if (settled && final_error < success_radius) ++successes;
  }
  out.avg_error = error_sum / double(episodes);
  out.success_rate = double(successes) / double(episodes);
  return out;
}

Trainer::Trainer(ArmModel model, SimConfig sim, PDGains gains, EpisodeConfig episode,
                 RewardWeights weights, CurriculumSchedule schedule, PpoConfig ppo,
                 TrainerOptions options)
    : model_(std::move(model)),
      sim_(sim),
      gains_(std::move(gains)),
      episode_(std::move(episode)),
      weights_(weights),
      schedule_(std::move(schedule)),
      ppo_(ppo),
      options_(std::move(options)) {}

TrainResult Trainer::run() {
  namespace fs = std::filesystem;
  check_arg(!schedule_.regions.empty(), "curriculum needs at least one region");
  {
    Rng nesting_rng(mix_seed(options_.seed, 0x777));
    schedule_.validate_nesting(nesting_rng, 200);
  }

  const bool artifacts = !options_.out_dir.empty();
  if (artifacts) fs::create_directories(options_.out_dir);

  // Environments.
  std::vector<EnvSlot> envs;
  int region_index = 0;
  for (int e = 0; e < ppo_.env_count; ++e) {
    EnvSlot slot;
    slot.env = std::make_unique<ReachEnv>(model_, sim_, gains_, episode_, weights_,
                                          schedule_.regions[0],
                                          mix_seed(options_.seed, 0x100 + uint64_t(e)));
    envs.push_back(std::move(slot));
  }
  ReachEnv eval_env(model_, sim_, gains_, episode_, weights_, schedule_.regions[0],
                    mix_seed(options_.seed, 0x400));

  // Policy: fresh, resumed, or transferred to a wider observation.
  const int obs_dim = envs[0].env->obs_dim();
  const int act_dim = model_.dof();
  uint64_t update_start = 0;
  GaussianPolicy policy;
  if (!options_.resume_checkpoint.empty()) {
    Checkpoint ckpt = load_checkpoint(options_.resume_checkpoint);
    check_arg(ckpt.policy.obs_dim() == obs_dim && ckpt.policy.act_dim() == act_dim,
              "checkpoint architecture does not match this environment");
    policy = std::move(ckpt.policy);
    update_start = ckpt.update_counter;
    region_index = std::min<int>(int(ckpt.region_index),
                                 int(schedule_.regions.size()) - 1);
  } else if (!options_.transfer_checkpoint.empty()) {
    Checkpoint ckpt = load_checkpoint(options_.transfer_checkpoint);
    check_arg(ckpt.policy.act_dim() == act_dim,
              "transfer checkpoint action dimension does not match");
    policy = std::move(ckpt.policy);
    policy.widen_observation(obs_dim);
  } else {
    Rng init_rng(mix_seed(options_.seed, 0x1));
    const VecX action_scale = episode_.action_scale.size() > 0
                                  ? episode_.action_scale
                                  : model_.velocity_limits();
    policy = GaussianPolicy(obs_dim, act_dim, options_.hidden, init_rng,
                            options_.init_std_fraction * action_scale);
  }

  for (auto& slot : envs)
    static_cast<ReachEnv*>(slot.env.get())->set_region(schedule_.regions[size_t(region_index)],
                                                       region_index);
  eval_env.set_region(schedule_.regions[size_t(region_index)], region_index);

  Adam adam(ppo_.learning_rate, ppo_.adam_beta1, ppo_.adam_beta2, ppo_.adam_eps);

  TrainResult result;
  std::ofstream metrics_out;
  if (artifacts) {
    metrics_out.open(fs::path(options_.out_dir) / "metrics.jsonl");
    check(bool(metrics_out), ErrorCode::kIo, "cannot write metrics log");
  }

  auto save = [&](const std::string& name, uint64_t counter) -> std::string {
    if (!artifacts) return "";
    Checkpoint ckpt;
    ckpt.policy = policy;
    ckpt.seed = options_.seed;
    ckpt.update_counter = counter;
    ckpt.region_index = uint32_t(region_index);
    const std::string path = (fs::path(options_.out_dir) / name).string();
    save_checkpoint(path, ckpt);
    return path;
  };

  double last_avg_error = std::numeric_limits<double>::quiet_NaN();
  double last_success = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> last_region_errors;

  for (long update = long(update_start) + 1;
       update <= long(update_start) + options_.max_updates; ++update) {
    RolloutBatch batch = collect_rollouts(envs, policy, ppo_.horizon, options_.seed,
                                          uint64_t(update), options_.workers);
    policy.normalizer.update(batch.obs_raw);
    GaeResult adv = gae_batch(batch, ppo_.gamma, ppo_.gae_lambda);
    normalize_advantages(adv.advantages);
    Rng shuffle_rng(mix_seed(options_.seed, 0x500, uint64_t(update)));
    const PpoStats stats = ppo_update(policy, batch, adv, ppo_, adam, shuffle_rng);

    MetricsRow row;
    row.update = update;
    row.region = region_index + 1;
    row.reward_mean = batch.rewards.mean();
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.clip_fraction = stats.clip_fraction;
    row.kl = stats.kl;

    if (schedule_.eval_cadence > 0 && update % schedule_.eval_cadence == 0) {
      eval_env.reseed(mix_seed(options_.seed, 0x400, uint64_t(update)));
      const SettledEvalResult ev =
          evaluate_settled_error(eval_env, policy, schedule_.eval_episodes,
                                 options_.settle, options_.success_radius);
      last_avg_error = ev.avg_error;
      last_success = ev.success_rate;

      if (options_.eval_all_regions) {
        last_region_errors.clear();
        for (size_t r = 0; r < schedule_.regions.size(); ++r) {
          ReachEnv series_env(model_, sim_, gains_, episode_, weights_,
                              schedule_.regions[r],
                              mix_seed(options_.seed, 0x410 + r, uint64_t(update)));
          series_env.set_region(schedule_.regions[r], int(r));
          const SettledEvalResult rr =
              evaluate_settled_error(series_env, policy, schedule_.eval_episodes,
                                     options_.settle, options_.success_radius);
          last_region_errors.push_back(rr.avg_error);
        }
      }

      const int next_region = advance_curriculum(schedule_, ev.avg_error, region_index);
      if (next_region != region_index) {
        region_index = next_region;
        for (auto& slot : envs)
          static_cast<ReachEnv*>(slot.env.get())
              ->set_region(schedule_.regions[size_t(region_index)], region_index);
        eval_env.set_region(schedule_.regions[size_t(region_index)], region_index);
        save("ckpt_region" + std::to_string(region_index + 1) + ".bin",
             uint64_t(update));
      }
    }
    row.avg_error_m = last_avg_error;
    row.success_rate = last_success;
    row.region_errors = last_region_errors;

    if (artifacts) metrics_out << row.to_json() << "\n";
    if (!options_.quiet)
      std::fprintf(stderr, "update %ld region %d reward %.4f err %.4f\n", update,
                   row.region, row.reward_mean, row.avg_error_m);
    result.metrics.push_back(std::move(row));

    if (stats.skipped && artifacts)
      metrics_out << "{\"update\":" << update << ",\"fault\":\"non-finite loss\"}\n";
  }

  result.final_checkpoint.policy = policy;
  result.final_checkpoint.seed = options_.seed;
  result.final_checkpoint.update_counter = update_start + uint64_t(options_.max_updates);
  result.final_checkpoint.region_index = uint32_t(region_index);
  result.reached_region = region_index;
  result.last_avg_error = last_avg_error;
  result.last_success_rate = last_success;
  result.final_checkpoint_path =
      save("final.bin", update_start + uint64_t(options_.max_updates));
  return result;
}

}  // namespace reachlab
