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

#include "reachlab/run_config.hpp"

#include <cmath>
#include <filesystem>

#include "reachlab/text_format.hpp"

namespace reachlab {
namespace {

constexpr double kDegToRad = 0.017453292519943295;

CurriculumRegion parse_region(const TextNode& node) {
  const std::string shape = node.str_or("shape", "torus");
  if (shape == "torus") {
    CurriculumRegion r = CurriculumRegion::partial_torus(
        node.num("major"), node.num("minor"),
        node.has("sweep_deg") ? node.num("sweep_deg") * kDegToRad : node.num("sweep"),
        node.vec3_or("center", Vec3::Zero()), node.bool_or("planar", false));
    r.axis = node.vec3_or("axis", Vec3::UnitZ());
    r.validate();
    return r;
  }
  if (shape == "box")
    return CurriculumRegion::box(node.vec3_or("center", Vec3::Zero()),
                                 node.vec3("extents"));
  node.error("unknown region shape '" + shape + "' (torus or box)");
}

VecX per_joint(const TextNode& parent, const std::string& key, int n,
               double fallback) {
  const TextNode* node = parent.find(key);
  if (!node) return VecX::Constant(n, fallback);
  const VecX v = node->as_vec();
  if (v.size() == 1) return VecX::Constant(n, v[0]);
  if (v.size() != n) node->error(key + " needs 1 or n values");
  return v;
}

}  // namespace

TrainerOptions RunConfig::trainer_options(uint64_t seed, int workers,
                                          const std::string& out_dir) const {
  TrainerOptions opt;
  opt.max_updates = updates;
  opt.seed = seed;
  opt.workers = workers;
  opt.out_dir = out_dir;
  opt.success_radius = eval.success_radius;
  opt.settle.velocity = eval.settle_velocity;
  opt.settle.window_s = eval.settle_window_s;
  opt.hidden = hidden;
  opt.init_std_fraction = init_std_fraction;
  return opt;
}

RunConfig load_run_config(const std::string& path) {
  const TextNode root = parse_text_file(path, "reachlab-config");
  RunConfig cfg;

  cfg.model_path = root.str("model");
  // Model paths resolve relative to the config file location.
  namespace fs = std::filesystem;
  fs::path model_path(cfg.model_path);
  if (model_path.is_relative()) model_path = fs::path(path).parent_path() / model_path;
  cfg.model = load_model(model_path.string());
  const int n = cfg.model.dof();

  if (const TextNode* sim = root.find("sim")) {
    cfg.sim.dt = sim->num_or("dt", cfg.sim.dt);
    cfg.sim.substeps = int(sim->int_or("substeps", cfg.sim.substeps));
    const std::string mode = sim->str_or("integration_mode", "accumulate");
    if (mode == "accumulate")
      cfg.sim.integration_mode = IntegrationMode::kAccumulate;
    else if (mode == "reference_position")
      cfg.sim.integration_mode = IntegrationMode::kReferencePosition;
    else
      sim->error("unknown integration_mode '" + mode + "'");
    cfg.sim.lambda1 = sim->num_or("lambda1", cfg.sim.lambda1);
    check(cfg.sim.dt > 0 && cfg.sim.substeps >= 1, ErrorCode::kParse,
          sim->location() + ": dt must be > 0 and substeps >= 1");
  }

  {
    const TextNode* pd = root.find("pd");
    cfg.pd.kp = pd ? per_joint(*pd, "kp", n, 400.0) : VecX::Constant(n, 400.0);
    cfg.pd.kd = pd ? per_joint(*pd, "kd", n, 40.0) : VecX::Constant(n, 40.0);
    check(cfg.pd.kp.minCoeff() >= 0 && cfg.pd.kd.minCoeff() >= 0, ErrorCode::kParse,
          "pd gains must be >= 0");
  }

  if (const TextNode* ep = root.find("episode")) {
    cfg.episode.horizon_steps = int(ep->int_or("horizon_steps", cfg.episode.horizon_steps));
    cfg.episode.abort_distance = ep->num_or("abort_distance", cfg.episode.abort_distance);
    const std::string scope = ep->str_or("abort_scope", "first_region");
    if (scope == "first_region")
      cfg.episode.abort_scope = AbortScope::kFirstRegionOnly;
    else if (scope == "all")
      cfg.episode.abort_scope = AbortScope::kAll;
    else if (scope == "none")
      cfg.episode.abort_scope = AbortScope::kNone;
    else
      ep->error("unknown abort_scope '" + scope + "'");
    if (auto hp = ep->vec_opt("home_pose")) {
      if (hp->size() != n) ep->require("home_pose").error("home_pose needs n values");
      cfg.episode.home_pose = *hp;
    }
    if (ep->has("action_scale"))
      cfg.episode.action_scale = per_joint(*ep, "action_scale", n, 0.0);
    if (const TextNode* obs = ep->find("obstacles")) {
      cfg.episode.obstacles.enabled = obs->bool_or("enabled", false);
      cfg.episode.obstacles.observe = obs->bool_or("observe", true);
      cfg.episode.obstacles.count_min = int(obs->int_or("count_min", 1));
      cfg.episode.obstacles.count_max = int(obs->int_or("count_max", 3));
      cfg.episode.obstacles.radius = obs->num_or("radius", 0.08);
      cfg.episode.obstacles.clearance = obs->num_or("clearance", 0.05);
      check(cfg.episode.obstacles.count_min >= 0 &&
                cfg.episode.obstacles.count_max >= cfg.episode.obstacles.count_min,
            ErrorCode::kParse, obs->location() + ": bad obstacle count range");
    }
  }
  if (cfg.episode.home_pose.size() == 0) cfg.episode.home_pose = VecX::Zero(n);

  if (const TextNode* rw = root.find("reward")) {
    cfg.reward.lambda_err = rw->num_or("lambda_err", cfg.reward.lambda_err);
    cfg.reward.lambda_eff = rw->num_or("lambda_eff", cfg.reward.lambda_eff);
    cfg.reward.lambda_obs = rw->num_or("lambda_obs", cfg.reward.lambda_obs);
    cfg.reward.d_max = rw->num_or("d_max", cfg.reward.d_max);
    check(cfg.reward.lambda_err >= 0 && cfg.reward.lambda_eff >= 0 &&
              cfg.reward.lambda_obs >= 0 && cfg.reward.d_max > 0,
          ErrorCode::kParse, rw->location() + ": reward weights must be >= 0");
  }

  const TextNode& cur = root.require("curriculum");
  cfg.curriculum.threshold = cur.num_or("threshold", 0.01);
  cfg.curriculum.eval_cadence = int(cur.int_or("eval_cadence", 10));
  cfg.curriculum.eval_episodes = int(cur.int_or("eval_episodes", 50));
  for (const TextNode* region : cur.find_all("region"))
    cfg.curriculum.regions.push_back(parse_region(*region));
  check(!cfg.curriculum.regions.empty(), ErrorCode::kParse,
        cur.location() + ": curriculum needs at least one region");

  if (const TextNode* ppo = root.find("ppo")) {
    cfg.ppo.gamma = ppo->num_or("gamma", cfg.ppo.gamma);
    cfg.ppo.gae_lambda = ppo->num_or("gae_lambda", cfg.ppo.gae_lambda);
    cfg.ppo.clip_epsilon = ppo->num_or("clip_epsilon", cfg.ppo.clip_epsilon);
    cfg.ppo.epochs_per_update = int(ppo->int_or("epochs", cfg.ppo.epochs_per_update));
    cfg.ppo.minibatch_size = int(ppo->int_or("minibatch", cfg.ppo.minibatch_size));
    cfg.ppo.learning_rate = ppo->num_or("learning_rate", cfg.ppo.learning_rate);
    cfg.ppo.value_loss_coeff = ppo->num_or("value_coeff", cfg.ppo.value_loss_coeff);
    cfg.ppo.entropy_coeff = ppo->num_or("entropy_coeff", cfg.ppo.entropy_coeff);
    cfg.ppo.max_grad_norm = ppo->num_or("max_grad_norm", cfg.ppo.max_grad_norm);
    cfg.ppo.horizon = int(ppo->int_or("horizon", cfg.ppo.horizon));
    cfg.ppo.env_count = int(ppo->int_or("envs", cfg.ppo.env_count));
    cfg.updates = int(ppo->int_or("updates", cfg.updates));
    cfg.init_std_fraction = ppo->num_or("init_std_fraction", cfg.init_std_fraction);
    if (auto hidden = ppo->vec_opt("hidden")) {
      cfg.hidden.clear();
      for (long i = 0; i < hidden->size(); ++i) cfg.hidden.push_back(int((*hidden)[i]));
    }
    check(cfg.ppo.gamma >= 0 && cfg.ppo.gamma <= 1 && cfg.ppo.gae_lambda >= 0 &&
              cfg.ppo.gae_lambda <= 1 && cfg.ppo.clip_epsilon > 0,
          ErrorCode::kParse, ppo->location() + ": invalid ppo settings");
  }

  if (const TextNode* ev = root.find("eval")) {
    cfg.eval.trials = int(ev->int_or("trials", cfg.eval.trials));
    cfg.eval.success_radius = ev->num_or("success_radius", cfg.eval.success_radius);
    cfg.eval.horizon_s = ev->num_or("horizon_s", cfg.eval.horizon_s);
    cfg.eval.settle_velocity = ev->num_or("settle_velocity", cfg.eval.settle_velocity);
    cfg.eval.settle_window_s = ev->num_or("settle_window_s", cfg.eval.settle_window_s);
    cfg.eval.chains = int(ev->int_or("chains", cfg.eval.chains));
    check(cfg.eval.success_radius > 0 && cfg.eval.horizon_s > 0, ErrorCode::kParse,
          ev->location() + ": invalid eval settings");
  }

  {
    TaskGains common;
    if (const TextNode* osc = root.find("osc")) {
      common.kd_joint = osc->num_or("kd_joint", 10.0);
      common.alpha = osc->num_or("alpha", 1.0);
      common.damping = osc->num_or("damping", 1e-4);
      cfg.osc.nullspace_stiffness = osc->num_or("nullspace_stiffness", 0.0);
      if (auto rest = osc->vec_opt("rest_pose")) cfg.osc.rest_pose = *rest;
      cfg.osc.gains_v = common;
      cfg.osc.gains_v.kappa_p = osc->num_or("kappa_p_vel", 4.0);
      cfg.osc.gains_a = common;
      cfg.osc.gains_a.kappa_p = osc->num_or("kappa_p_acc", 100.0);
      cfg.osc.gains_a.kappa_d = osc->num_or("kappa_d", 20.0);
    } else {
      cfg.osc.gains_v = common;
      cfg.osc.gains_v.kappa_p = 4.0;
      cfg.osc.gains_a = common;
    }
  }

  if (const TextNode* ab = root.find("ablation")) {
    cfg.ablation.seeds = int(ab->int_or("seeds", cfg.ablation.seeds));
    cfg.ablation.updates = int(ab->int_or("updates", cfg.ablation.updates));
  }
  return cfg;
}

}  // namespace reachlab
