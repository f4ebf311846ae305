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

// Clipped-surrogate PPO on rollouts from parallel environments, with
// generalized advantage estimation and per-update advantage normalization.
// The loss/gradient path is exposed as a pure function so tests can check it
// against central finite differences.

#include <cstdint>
#include <vector>

#include "reachlab/policy.hpp"

namespace reachlab {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  int epochs_per_update = 5;
  int minibatch_size = 512;
  double learning_rate = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double value_loss_coeff = 0.5;
  double entropy_coeff = 0.0;
  double max_grad_norm = 0.5;
  int horizon = 400;   // steps collected per environment per update
  int env_count = 40;
};

// Transitions from E environments over H steps; column index e * H + t.
struct RolloutBatch {
  int envs = 0;
  int steps = 0;

  MatX obs_norm;        // D x EH, normalized with the collection snapshot
  MatX obs_raw;         // D x EH
  MatX actions;         // A x EH
  VecX log_probs;       // EH
  VecX rewards;         // EH
  VecX values;          // EH, V(s_t) under the snapshot
  VecX next_values;     // EH, V(s_{t+1}); bootstrap at truncations
  std::vector<uint8_t> done;      // episode ended after this step
  std::vector<uint8_t> terminal;  // true termination (no bootstrap)

  // Per-step diagnostics for logs and replay checks.
  VecX info_error;
  VecX info_qddot_norm;
  VecX info_psi_sum;

  long size() const { return long(envs) * long(steps); }
  long index(int env, int t) const { return long(env) * steps + t; }
};

struct GaeResult {
  VecX advantages;
  VecX returns;
};

// Single-stream GAE.  next_values[t] holds V(s_{t+1}) (the bootstrap value at
// truncations); it is ignored wherever terminal[t] is set.
GaeResult gae(const VecX& rewards, const VecX& values, const VecX& next_values,
              const std::vector<uint8_t>& done, const std::vector<uint8_t>& terminal,
              double gamma, double lambda);

// Applies GAE env-row by env-row over a batch.
GaeResult gae_batch(const RolloutBatch& batch, double gamma, double lambda);

// In-place normalization to mean 0 / std 1 (std floor 1e-8).
void normalize_advantages(VecX& advantages);

struct PpoGrads {
  MlpParams actor;
  VecX log_std;
  MlpParams critic;

  static PpoGrads zeros_like(const GaussianPolicy& policy);
  VecX flatten() const;
  double norm() const;
  void scale(double s);
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl = 0.0;            // mean(logprob_old - logprob_new)
  double clip_fraction = 0.0;
  bool skipped = false;       // non-finite loss; update was not applied
};

struct PpoMinibatch {
  MatX obs;        // D x B (already normalized)
  MatX actions;    // A x B
  VecX log_probs;  // B
  VecX advantages; // B
  VecX returns;    // B
};

// Total loss L = -mean(min(rho A, clip(rho) A)) + c_v mean((V - R)^2)
//              - c_e entropy; fills grads/stats when non-null.
double ppo_loss(const GaussianPolicy& policy, const PpoMinibatch& mb,
                const PpoConfig& cfg, PpoGrads* grads, PpoStats* stats);

// One PPO update: epochs x shuffled minibatches of Adam steps with global
// gradient-norm clipping; log_std re-clamped after every step.  Advantages
// must already be normalized.  Returns averaged stats; a non-finite loss
// skips the remaining steps and flags the stats.
PpoStats ppo_update(GaussianPolicy& policy, const RolloutBatch& batch,
                    const GaeResult& gae_result, const PpoConfig& cfg, Adam& adam,
                    Rng& shuffle_rng);

}  // namespace reachlab
