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

#include "reachlab/policy.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace reachlab {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr char kMagic[8] = {'R', 'L', 'A', 'B', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;
}  // namespace

void RunningNormalizer::update(const MatX& batch) {
  check_arg(batch.rows() == mean_.size(), "normalizer dimension mismatch");
  // Chan et al. parallel merge of (count, mean, m2) with the batch moments.
  const double bn = static_cast<double>(batch.cols());
  if (bn == 0) return;
  const VecX bmean = batch.rowwise().mean();
  VecX bm2 = VecX::Zero(mean_.size());
  for (long c = 0; c < batch.cols(); ++c)
    bm2 += (batch.col(c) - bmean).cwiseProduct(batch.col(c) - bmean);
  const VecX delta = bmean - mean_;
  const double total = count_ + bn;
  mean_ += delta * (bn / total);
  m2_ += bm2 + delta.cwiseProduct(delta) * (count_ * bn / total);
  count_ = total;
}

VecX RunningNormalizer::variance() const {
  if (count_ < 2.0) return VecX::Ones(mean_.size());
  return m2_ / count_;
}

VecX RunningNormalizer::normalize(const VecX& x) const {
  check_arg(x.size() == mean_.size(), "normalizer dimension mismatch");
  if (count_ < 2.0) return x;
  const VecX std = (variance().array() + 1e-8).sqrt();
  VecX z = (x - mean_).cwiseQuotient(std);
  // Keep early outliers from swamping the network.
  return z.cwiseMax(-10.0).cwiseMin(10.0);
}

void RunningNormalizer::restore(double count, const VecX& mean, const VecX& m2) {
  count_ = count;
  mean_ = mean;
  m2_ = m2;
}

void RunningNormalizer::widen(int new_dim) {
  check_arg(new_dim >= dim(), "cannot shrink a normalizer");
  VecX mean = VecX::Zero(new_dim);
  VecX m2 = VecX::Zero(new_dim);
  mean.head(dim()) = mean_;
  m2.head(dim()) = m2_;
  // New dimensions act as unit-variance passthrough.
  m2.tail(new_dim - dim()).setConstant(std::max(count_, 1.0));
  mean_ = mean;
  m2_ = m2;
}

GaussianPolicy::GaussianPolicy(int obs_dim, int act_dim, std::vector<int> hidden_dims,
                               Rng& rng, const VecX& initial_std)
    : hidden(std::move(hidden_dims)) {
  check_arg(initial_std.size() == act_dim, "initial std has wrong dimension");
  std::vector<int> actor_dims{obs_dim};
  actor_dims.insert(actor_dims.end(), hidden.begin(), hidden.end());
  actor_dims.push_back(act_dim);
  actor = MlpParams::create(actor_dims, rng, 0.01);

  std::vector<int> critic_dims{obs_dim};
  critic_dims.insert(critic_dims.end(), hidden.begin(), hidden.end());
  critic_dims.push_back(1);
  critic = MlpParams::create(critic_dims, rng, 1.0);

  log_std = initial_std.array().log();
  normalizer = RunningNormalizer(obs_dim);
  clamp_log_std();
}

GaussianSample GaussianPolicy::sample(const VecX& obs_norm, Rng& rng) const {
  const VecX mean = mean_action(obs_norm);
  VecX action(mean.size());
  for (long i = 0; i < mean.size(); ++i)
    action[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
  return GaussianSample{action, gaussian_log_prob(mean, log_std, action)};
}

double GaussianPolicy::log_prob(const VecX& obs_norm, const VecX& action) const {
  return gaussian_log_prob(mean_action(obs_norm), log_std, action);
}

double GaussianPolicy::entropy() const {
  return log_std.sum() + 0.5 * double(log_std.size()) * (1.0 + kLog2Pi);
}

void GaussianPolicy::clamp_log_std() {
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

void GaussianPolicy::widen_observation(int new_obs_dim) {
  const int old_dim = obs_dim();
  check_arg(new_obs_dim >= old_dim, "cannot shrink the observation space");
  if (new_obs_dim == old_dim) return;
  for (MlpParams* net : {&actor, &critic}) {
    MatX w = MatX::Zero(net->layers[0].weight.rows(), new_obs_dim);
    w.leftCols(old_dim) = net->layers[0].weight;
    net->layers[0].weight = std::move(w);
  }
  normalizer.widen(new_obs_dim);
}

double gaussian_log_prob(const VecX& mean, const VecX& log_std, const VecX& action) {
  double lp = -0.5 * double(mean.size()) * kLog2Pi;
  for (long i = 0; i < mean.size(); ++i) {
    const double z = (action[i] - mean[i]) / std::exp(log_std[i]);
    lp -= 0.5 * z * z + log_std[i];
  }
  return lp;
}

// ---- checkpoint I/O ---------------------------------------------------------

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_vec(std::ostream& out, const VecX& v) {
  for (long i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

VecX get_vec(std::istream& in, long n) {
  VecX v(n);
  for (long i = 0; i < n; ++i) v[i] = get_f64(in);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint '" + path + "'");
  const GaussianPolicy& p = ckpt.policy;
  out.write(kMagic, 8);
  put_u32(out, kVersion);
  put_u32(out, uint32_t(p.obs_dim()));
  put_u32(out, uint32_t(p.act_dim()));
  put_u32(out, uint32_t(p.hidden.size()));
  for (int h : p.hidden) put_u32(out, uint32_t(h));
  put_u64(out, ckpt.seed);
  put_u64(out, ckpt.update_counter);
  put_u32(out, ckpt.region_index);

  const VecX actor_flat = p.actor.flatten();
  const VecX critic_flat = p.critic.flatten();
  const uint64_t total = uint64_t(actor_flat.size()) + uint64_t(p.log_std.size()) +
                         uint64_t(critic_flat.size()) + 1 + 2 * uint64_t(p.obs_dim());
  put_u64(out, total);
  put_vec(out, actor_flat);
  put_vec(out, p.log_std);
  put_vec(out, critic_flat);
  put_f64(out, p.normalizer.count());
  put_vec(out, p.normalizer.mean());
  put_vec(out, p.normalizer.m2());
  if (!out) fail(ErrorCode::kIo, "short write to checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    fail(ErrorCode::kParse, "'" + path + "' is not a reachlab checkpoint");
  const uint32_t version = get_u32(in);
  if (version != kVersion)
    fail(ErrorCode::kParse, "unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  const int obs_dim = int(get_u32(in));
  const int act_dim = int(get_u32(in));
  const uint32_t hidden_count = get_u32(in);
  std::vector<int> hidden(hidden_count);
  for (auto& h : hidden) h = int(get_u32(in));
  ckpt.seed = get_u64(in);
  ckpt.update_counter = get_u64(in);
  ckpt.region_index = get_u32(in);
  const uint64_t total = get_u64(in);

  Rng scratch(0);
  GaussianPolicy p(obs_dim, act_dim, hidden, scratch, VecX::Ones(act_dim));
  const VecX actor_flat = get_vec(in, long(p.actor.parameter_count()));
  p.actor.unflatten(actor_flat);
  p.log_std = get_vec(in, act_dim);
  const VecX critic_flat = get_vec(in, long(p.critic.parameter_count()));
  p.critic.unflatten(critic_flat);
  const double count = get_f64(in);
  const VecX mean = get_vec(in, obs_dim);
  const VecX m2 = get_vec(in, obs_dim);
  p.normalizer.restore(count, mean, m2);
  if (!in) fail(ErrorCode::kParse, "truncated checkpoint '" + path + "'");
  const uint64_t expect = uint64_t(p.actor.parameter_count()) + uint64_t(act_dim) +
                          uint64_t(p.critic.parameter_count()) + 1 + 2 * uint64_t(obs_dim);
  if (total != expect)
    fail(ErrorCode::kParse, "checkpoint parameter count mismatch in '" + path + "'");
  ckpt.policy = std::move(p);
  return ckpt;
}

}  // namespace reachlab
