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

// Small fully-connected network with tanh hidden layers and a linear output,
// with hand-rolled batched backprop and an Adam optimizer.  Everything is
// double precision so gradients can be checked against central differences.

#include <vector>

#include "reachlab/common.hpp"
#include "reachlab/rng.hpp"

namespace reachlab {

struct MlpParams {
  struct Layer {
    MatX weight;  // out x in
    VecX bias;
  };
  std::vector<Layer> layers;

  // dims = {in, hidden..., out}; orthogonal weight init (gain sqrt(2) on
  // hidden layers, `final_gain` on the output layer), zero biases.
  static MlpParams create(const std::vector<int>& dims, Rng& rng,
                          double final_gain = 1.0);

  int input_dim() const { return static_cast<int>(layers.front().weight.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().weight.rows()); }
  size_t parameter_count() const;

  void add_scaled(const MlpParams& other, double scale);  // this += scale * other
  void set_zero();
  // Flat parameter vector, layer order, row-major weights then bias.
  VecX flatten() const;
  void unflatten(const VecX& flat);
};

// Per-layer activations cached by the forward pass for backprop.
struct MlpWorkspace {
  std::vector<MatX> activations;  // activations[0] = input batch
};

// Batched forward: input is in x B, returns out x B.
MatX mlp_forward(const MlpParams& params, const MatX& input, MlpWorkspace* ws = nullptr);
VecX mlp_forward(const MlpParams& params, const VecX& input);

// Batched backward: output_grad is dL/d(output), out x B.  Accumulates
// parameter gradients into `grad` (same shape as params) and returns nothing;
// input gradients are not needed anywhere.
void mlp_backward(const MlpParams& params, const MlpWorkspace& ws,
                  const MatX& output_grad, MlpParams& grad);

class Adam {
 public:
  Adam(double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one step to `flat_params` given `flat_grad` (same length).
  void step(VecX& flat_params, const VecX& flat_grad);
  void reset() { m_.resize(0); v_.resize(0); t_ = 0; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  VecX m_, v_;
  long t_ = 0;
};

}  // namespace reachlab
