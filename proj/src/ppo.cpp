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

#include "reachlab/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reachlab {

GaeResult gae(const VecX& rewards, const VecX& values, const VecX& next_values,
              const std::vector<uint8_t>& done, const std::vector<uint8_t>& terminal,
              double gamma, double lambda) {
  const long t_len = rewards.size();
  check_arg(values.size() == t_len && next_values.size() == t_len &&
                long(done.size()) == t_len && long(terminal.size()) == t_len,
            "gae inputs must share one length");
  GaeResult out;
  out.advantages = VecX::Zero(t_len);
  out.returns = VecX::Zero(t_len);
  double carry = 0.0;
  for (long t = t_len - 1; t >= 0; --t) {
    const double v_next = terminal[size_t(t)] ? 0.0 : next_values[t];
    const double delta = rewards[t] + gamma * v_next - values[t];
    carry = delta + gamma * lambda * (done[size_t(t)] ? 0.0 : carry);
    out.advantages[t] = carry;
    out.returns[t] = carry + values[t];
  }
  return out;
}

GaeResult gae_batch(const RolloutBatch& batch, double gamma, double lambda) {
  GaeResult out;
  out.advantages = VecX::Zero(batch.size());
  out.returns = VecX::Zero(batch.size());
  for (int e = 0; e < batch.envs; ++e) {
    const long base = batch.index(e, 0);
    const long h = batch.steps;
    const GaeResult row = gae(
        batch.rewards.segment(base, h), batch.values.segment(base, h),
        batch.next_values.segment(base, h),
        std::vector<uint8_t>(batch.done.begin() + base, batch.done.begin() + base + h),
        std::vector<uint8_t>(batch.terminal.begin() + base,
                             batch.terminal.begin() + base + h),
        gamma, lambda);
    out.advantages.segment(base, h) = row.advantages;
    out.returns.segment(base, h) = row.returns;
  }
  return out;
}

void normalize_advantages(VecX& advantages) {
  const double mean = advantages.mean();
  const double var =
      (advantages.array() - mean).square().sum() / double(advantages.size());
  const double std = std::max(std::sqrt(var), 1e-8);
  advantages = (advantages.array() - mean) / std;
}

PpoGrads PpoGrads::zeros_like(const GaussianPolicy& policy) {
  PpoGrads g;
  g.actor = policy.actor;
  g.actor.set_zero();
  g.log_std = VecX::Zero(policy.log_std.size());
  g.critic = policy.critic;
  g.critic.set_zero();
  return g;
}

VecX PpoGrads::flatten() const {
  const VecX a = actor.flatten();
  const VecX c = critic.flatten();
  VecX flat(a.size() + log_std.size() + c.size());
  flat << a, log_std, c;
  return flat;
}

double PpoGrads::norm() const { return flatten().norm(); }

void PpoGrads::scale(double s) {
  for (auto& l : actor.layers) {
    l.weight *= s;
    l.bias *= s;
  }
  log_std *= s;
  for (auto& l : critic.layers) {
    l.weight *= s;
    l.bias *= s;
  }
}

double ppo_loss(const GaussianPolicy& policy, const PpoMinibatch& mb,
                const PpoConfig& cfg, PpoGrads* grads, PpoStats* stats) {
  const long batch_n = mb.obs.cols();
  const long act_n = policy.act_dim();
  check_arg(batch_n > 0, "empty minibatch");

  MlpWorkspace actor_ws, critic_ws;
  const MatX mean = mlp_forward(policy.actor, mb.obs, &actor_ws);
  const MatX value = mlp_forward(policy.critic, mb.obs, &critic_ws);

  const VecX sigma = policy.log_std.array().exp();
  const VecX inv_var = sigma.array().square().inverse();

  // Per-sample log-probs under the current parameters.
  VecX log_prob(batch_n);
  {
    const double base = -0.5 * double(act_n) * 1.8378770664093454836 - policy.log_std.sum();
    for (long j = 0; j < batch_n; ++j) {
      const VecX diff = mb.actions.col(j) - mean.col(j);
      log_prob[j] = base - 0.5 * diff.cwiseProduct(diff).dot(inv_var);
    }
  }

  const VecX ratio = (log_prob - mb.log_probs).array().exp();
  double surrogate = 0.0;
  double value_loss = 0.0;
  long clipped = 0;
  VecX ratio_grad_coeff = VecX::Zero(batch_n);  // dL_surr/dlogprob per sample
  for (long j = 0; j < batch_n; ++j) {
    const double adv = mb.advantages[j];
    const double unclipped = ratio[j] * adv;
    const double clip_ratio =
        std::clamp(ratio[j], 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    surrogate += -std::min(unclipped, clip_ratio * adv);
    if (std::abs(ratio[j] - 1.0) > cfg.clip_epsilon) ++clipped;
    // Gradient flows only through the unclipped branch when it is active.
    const bool active = unclipped <= clip_ratio * adv;
    if (active) ratio_grad_coeff[j] = -adv * ratio[j] / double(batch_n);

    const double verr = value(0, j) - mb.returns[j];
    value_loss += verr * verr;
  }
  surrogate /= double(batch_n);
  value_loss /= double(batch_n);

  const double entropy = policy.entropy();
  const double total = surrogate + cfg.value_loss_coeff * value_loss -
                       cfg.entropy_coeff * entropy;

  if (stats) {
    stats->policy_loss = surrogate;
    stats->value_loss = value_loss;
    stats->entropy = entropy;
    stats->kl = (mb.log_probs - log_prob).mean();
    stats->clip_fraction = double(clipped) / double(batch_n);
  }

  if (grads) {
    // Actor: dlogprob/dmean_i = (a_i - mean_i) / sigma_i^2.
    MatX mean_grad(act_n, batch_n);
    VecX log_std_grad = VecX::Zero(act_n);
    for (long j = 0; j < batch_n; ++j) {
      const VecX diff = mb.actions.col(j) - mean.col(j);
      const VecX dlp_dmean = diff.cwiseProduct(inv_var);
      mean_grad.col(j) = ratio_grad_coeff[j] * dlp_dmean;
      // dlogprob/dlog_std_i = diff_i^2 / sigma_i^2 - 1.
      log_std_grad +=
          ratio_grad_coeff[j] *
          (diff.cwiseProduct(diff).cwiseProduct(inv_var) - VecX::Ones(act_n));
    }
    log_std_grad.array() -= cfg.entropy_coeff;  // d(-c_e entropy)/dlog_std = -c_e
    mlp_backward(policy.actor, actor_ws, mean_grad, grads->actor);
    grads->log_std += log_std_grad;

    MatX value_grad(1, batch_n);
    for (long j = 0; j < batch_n; ++j)
      value_grad(0, j) =
          2.0 * cfg.value_loss_coeff * (value(0, j) - mb.returns[j]) / double(batch_n);
    mlp_backward(policy.critic, critic_ws, value_grad, grads->critic);
  }
  return total;
}

namespace {

void apply_flat_update(GaussianPolicy& policy, const PpoGrads& grads, Adam& adam) {
  const VecX actor_flat = policy.actor.flatten();
  const VecX critic_flat = policy.critic.flatten();
  VecX params(actor_flat.size() + policy.log_std.size() + critic_flat.size());
  params << actor_flat, policy.log_std, critic_flat;
  adam.step(params, grads.flatten());
  policy.actor.unflatten(params.head(actor_flat.size()));
  policy.log_std = params.segment(actor_flat.size(), policy.log_std.size());
  policy.critic.unflatten(params.tail(critic_flat.size()));
  policy.clamp_log_std();
}

}  // namespace

PpoStats ppo_update(GaussianPolicy& policy, const RolloutBatch& batch,
                    const GaeResult& gae_result, const PpoConfig& cfg, Adam& adam,
                    Rng& shuffle_rng) {
  const long total = batch.size();
  check_arg(gae_result.advantages.size() == total, "GAE result does not match batch");

  std::vector<long> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0);

  PpoStats avg;
  long steps = 0;
  const long mb_size = std::min<long>(cfg.minibatch_size, total);

  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    // Fisher-Yates with our own rng for reproducibility.
    for (long i = total - 1; i > 0; --i) {
      const long j = long(shuffle_rng.uniform_index(uint64_t(i + 1)));
      std::swap(order[size_t(i)], order[size_t(j)]);
    }
    for (long start = 0; start + mb_size <= total; start += mb_size) {
      PpoMinibatch mb;
      mb.obs.resize(batch.obs_norm.rows(), mb_size);
      mb.actions.resize(batch.actions.rows(), mb_size);
      mb.log_probs.resize(mb_size);
      mb.advantages.resize(mb_size);
      mb.returns.resize(mb_size);
      for (long k = 0; k < mb_size; ++k) {
        const long src = order[size_t(start + k)];
        mb.obs.col(k) = batch.obs_norm.col(src);
        mb.actions.col(k) = batch.actions.col(src);
        mb.log_probs[k] = batch.log_probs[src];
        mb.advantages[k] = gae_result.advantages[src];
        mb.returns[k] = gae_result.returns[src];
      }

      PpoGrads grads = PpoGrads::zeros_like(policy);
      PpoStats stats;
      const double loss = ppo_loss(policy, mb, cfg, &grads, &stats);
      if (!std::isfinite(loss)) {
        avg.skipped = true;
        return avg;
      }
      const double gnorm = grads.norm();
      if (cfg.max_grad_norm > 0 && gnorm > cfg.max_grad_norm)
        grads.scale(cfg.max_grad_norm / gnorm);
      apply_flat_update(policy, grads, adam);

      avg.policy_loss += stats.policy_loss;
      avg.value_loss += stats.value_loss;
      avg.entropy += stats.entropy;
      avg.kl += stats.kl;
      avg.clip_fraction += stats.clip_fraction;
      ++steps;
    }
  }
  if (steps > 0) {
    avg.policy_loss /= double(steps);
    avg.value_loss /= double(steps);
    avg.entropy /= double(steps);
    avg.kl /= double(steps);
    avg.clip_fraction /= double(steps);
  }
  return avg;
}

}  // namespace reachlab
