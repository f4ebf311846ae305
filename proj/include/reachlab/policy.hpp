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

// Diagonal-Gaussian policy: a tanh MLP actor with a state-independent
// learned log-std, a value head of the same architecture, and a running
// observation normalizer whose statistics travel with checkpoints.

#include <string>
#include <vector>

#include "reachlab/mlp.hpp"

namespace reachlab {

// Welford-style running mean/variance, updated batch-wise between rollout
// collections so normalization never depends on intra-batch ordering.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim)
      : count_(0.0), mean_(VecX::Zero(dim)), m2_(VecX::Zero(dim)) {}

  void update(const MatX& batch);  // dim x B
  VecX normalize(const VecX& x) const;
  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const VecX& mean() const { return mean_; }
  const VecX& m2() const { return m2_; }
  VecX variance() const;
  void restore(double count, const VecX& mean, const VecX& m2);
  // Appends dimensions that normalize to the identity (mean 0, variance 1).
  void widen(int new_dim);

 private:
  double count_ = 0.0;
  VecX mean_;
  VecX m2_;
};

inline constexpr double kLogStdMin = -9.210340371976182;  // log(1e-4)
inline constexpr double kLogStdMax = 2.302585092994046;   // log(10)

struct GaussianSample {
  VecX action;
  double log_prob = 0.0;
};

class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  // hidden e.g. {128, 128}; log-std initialized per dimension to
  // log(initial_std).
  GaussianPolicy(int obs_dim, int act_dim, std::vector<int> hidden, Rng& rng,
                 const VecX& initial_std);

  int obs_dim() const { return actor.input_dim(); }
  int act_dim() const { return actor.output_dim(); }

  VecX normalize(const VecX& obs) const { return normalizer.normalize(obs); }

  // All three take an already-normalized observation.
  VecX mean_action(const VecX& obs_norm) const { return mlp_forward(actor, obs_norm); }
  GaussianSample sample(const VecX& obs_norm, Rng& rng) const;
  double log_prob(const VecX& obs_norm, const VecX& action) const;
  double value(const VecX& obs_norm) const { return mlp_forward(critic, obs_norm)[0]; }

  double entropy() const;  // state-independent for a diagonal Gaussian
  void clamp_log_std();

  // Grows the observation space; new input columns are zero so the policy's
  // output is exactly preserved regardless of what the new inputs carry.
  void widen_observation(int new_obs_dim);

  MlpParams actor;
  VecX log_std;
  MlpParams critic;
  RunningNormalizer normalizer;
  std::vector<int> hidden;
};

double gaussian_log_prob(const VecX& mean, const VecX& log_std, const VecX& action);

// ---- checkpoints ------------------------------------------------------------
// Binary, little-endian: magic, format version, architecture dims, then one
// flat f64 parameter vector (actor, log_std, critic, normalizer stats), plus
// seed, update counter and curriculum region index.

struct Checkpoint {
  GaussianPolicy policy;
  uint64_t seed = 0;
  uint64_t update_counter = 0;
  uint32_t region_index = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace reachlab
