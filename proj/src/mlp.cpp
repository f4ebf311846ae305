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

#include "reachlab/mlp.hpp"

#include <Eigen/QR>
#include <cmath>

namespace reachlab {
namespace {

MatX orthogonal(int rows, int cols, double gain, Rng& rng) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  MatX gauss(big, small);
  for (int c = 0; c < small; ++c)
    for (int r = 0; r < big; ++r) gauss(r, c) = rng.normal();
  Eigen::HouseholderQR<MatX> qr(gauss);
  MatX q = qr.householderQ() * MatX::Identity(big, small);
  // Fix the sign ambiguity so the factorization is deterministic.
  const MatX r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (int c = 0; c < small; ++c)
    if (r(c, c) < 0) q.col(c) *= -1.0;
  if (rows < cols) return gain * q.transpose();
  return gain * q;
}

}  // namespace

MlpParams MlpParams::create(const std::vector<int>& dims, Rng& rng, double final_gain) {
  check_arg(dims.size() >= 2, "network needs at least input and output dims");
  MlpParams p;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const bool last = i + 2 == dims.size();
    Layer layer;
    layer.weight = orthogonal(dims[i + 1], dims[i],
                              last ? final_gain : std::sqrt(2.0), rng);
    layer.bias = VecX::Zero(dims[i + 1]);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

size_t MlpParams::parameter_count() const {
  size_t n = 0;
  for (const auto& l : layers) n += size_t(l.weight.size()) + size_t(l.bias.size());
  return n;
}

void MlpParams::add_scaled(const MlpParams& other, double scale) {
  for (size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += scale * other.layers[i].weight;
    layers[i].bias += scale * other.layers[i].bias;
  }
}

void MlpParams::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

VecX MlpParams::flatten() const {
  VecX flat(parameter_count());
  long at = 0;
  for (const auto& l : layers) {
    for (long r = 0; r < l.weight.rows(); ++r)
      for (long c = 0; c < l.weight.cols(); ++c) flat[at++] = l.weight(r, c);
    for (long r = 0; r < l.bias.size(); ++r) flat[at++] = l.bias[r];
  }
  return flat;
}

void MlpParams::unflatten(const VecX& flat) {
  check_arg(size_t(flat.size()) == parameter_count(), "flat vector size mismatch");
  long at = 0;
  for (auto& l : layers) {
    for (long r = 0; r < l.weight.rows(); ++r)
      for (long c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[at++];
    for (long r = 0; r < l.bias.size(); ++r) l.bias[r] = flat[at++];
  }
}

MatX mlp_forward(const MlpParams& params, const MatX& input, MlpWorkspace* ws) {
  check_arg(input.rows() == params.input_dim(), "input dimension mismatch");
  if (ws) {
    ws->activations.clear();
    ws->activations.push_back(input);
  }
  MatX h = input;
  for (size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    MatX z = (l.weight * h).colwise() + l.bias;
    if (i + 1 < params.layers.size()) z = z.array().tanh();
    h = std::move(z);
    if (ws) ws->activations.push_back(h);
  }
  return h;
}

VecX mlp_forward(const MlpParams& params, const VecX& input) {
  return mlp_forward(params, MatX(input), nullptr).col(0);
}

void mlp_backward(const MlpParams& params, const MlpWorkspace& ws,
                  const MatX& output_grad, MlpParams& grad) {
  check_arg(ws.activations.size() == params.layers.size() + 1,
            "workspace does not match a forward pass");
  check_arg(grad.layers.size() == params.layers.size(), "grad shape mismatch");

  MatX delta = output_grad;  // dL/dz of the current layer (output is linear)
  for (int i = static_cast<int>(params.layers.size()) - 1; i >= 0; --i) {
    const MatX& below = ws.activations[size_t(i)];
    grad.layers[size_t(i)].weight.noalias() += delta * below.transpose();
    grad.layers[size_t(i)].bias += delta.rowwise().sum();
    if (i > 0) {
      MatX da = params.layers[size_t(i)].weight.transpose() * delta;
      // tanh'(z) = 1 - a^2 with a the cached activation.
      delta = da.array() * (1.0 - ws.activations[size_t(i)].array().square());
    }
  }
}

void Adam::step(VecX& flat_params, const VecX& flat_grad) {
  check_arg(flat_params.size() == flat_grad.size(), "param/grad size mismatch");
  if (m_.size() != flat_params.size()) {
    m_ = VecX::Zero(flat_params.size());
    v_ = VecX::Zero(flat_params.size());
    t_ = 0;
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * flat_grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * flat_grad.cwiseProduct(flat_grad);
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  flat_params -=
      (lr_ / bc1) * m_.cwiseQuotient(((v_ / bc2).cwiseSqrt().array() + eps_).matrix());
}

}  // namespace reachlab
