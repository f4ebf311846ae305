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

#include "reachlab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "reachlab/runs.hpp"

namespace {

thread_local std::string g_last_error;

rlab_status to_status(reachlab::ErrorCode code) {
  switch (code) {
    case reachlab::ErrorCode::kInvalidArgument:
      return RLAB_ERR_INVALID_ARGUMENT;
    case reachlab::ErrorCode::kParse:
      return RLAB_ERR_PARSE;
    case reachlab::ErrorCode::kIo:
      return RLAB_ERR_IO;
    case reachlab::ErrorCode::kNumeric:
      return RLAB_ERR_NUMERIC;
    case reachlab::ErrorCode::kInternal:
      return RLAB_ERR_INTERNAL;
  }
  return RLAB_ERR_INTERNAL;
}

template <typename Fn>
rlab_status guarded(Fn&& fn) {
  try {
    fn();
    return RLAB_OK;
  } catch (const reachlab::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RLAB_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

reachlab::VecX to_vec(const double* data, long n) {
  reachlab::VecX v(n);
  for (long i = 0; i < n; ++i) v[i] = data[i];
  return v;
}

}  // namespace

struct rlab_model {
  reachlab::ArmModel model;
};

extern "C" {

const char* rlab_version(void) { return "reachlab 1.0.0"; }

const char* rlab_last_error(void) { return g_last_error.c_str(); }

void rlab_string_free(char* s) { std::free(s); }

rlab_status rlab_model_load(const char* path, rlab_model** out) {
  return guarded([&] {
    reachlab::check_arg(path && out, "path and out must be non-null");
    *out = new rlab_model{reachlab::load_model(path)};
  });
}

rlab_status rlab_model_parse(const char* text, rlab_model** out) {
  return guarded([&] {
    reachlab::check_arg(text && out, "text and out must be non-null");
    *out = new rlab_model{reachlab::parse_model(text)};
  });
}

void rlab_model_free(rlab_model* model) { delete model; }

int32_t rlab_model_dof(const rlab_model* model) {
  return model ? model->model.dof() : 0;
}

rlab_status rlab_model_ee_position(const rlab_model* model, const double* q,
                                   double out_xyz[3]) {
  return guarded([&] {
    reachlab::check_arg(model && q && out_xyz, "null argument");
    const reachlab::Vec3 x =
        reachlab::ee_position(model->model, to_vec(q, model->model.dof()));
    for (int i = 0; i < 3; ++i) out_xyz[i] = x[i];
  });
}

rlab_status rlab_model_jacobian(const rlab_model* model, const double* q,
                                double* out_3xn) {
  return guarded([&] {
    reachlab::check_arg(model && q && out_3xn, "null argument");
    const int n = model->model.dof();
    const reachlab::MatX jac = reachlab::jacobian(model->model, to_vec(q, n));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < n; ++c) out_3xn[r * n + c] = jac(r, c);
  });
}

rlab_status rlab_model_mass_matrix(const rlab_model* model, const double* q,
                                   double* out_nxn) {
  return guarded([&] {
    reachlab::check_arg(model && q && out_nxn, "null argument");
    const int n = model->model.dof();
    const reachlab::MatX m = reachlab::mass_matrix(model->model, to_vec(q, n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out_nxn[r * n + c] = m(r, c);
  });
}

rlab_status rlab_model_bias_forces(const rlab_model* model, const double* q,
                                   const double* qdot, double* coriolis_out,
                                   double* gravity_out) {
  return guarded([&] {
    reachlab::check_arg(model && q && qdot, "null argument");
    const int n = model->model.dof();
    const reachlab::BiasForces bias =
        reachlab::bias_forces(model->model, to_vec(q, n), to_vec(qdot, n));
    for (int i = 0; i < n; ++i) {
      if (coriolis_out) coriolis_out[i] = bias.coriolis[i];
      if (gravity_out) gravity_out[i] = bias.gravity[i];
    }
  });
}

rlab_status rlab_train(const char* config_path, const char* out_dir, uint64_t seed,
                       int32_t workers, const char* resume_checkpoint,
                       const char* transfer_checkpoint, char** summary_json_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && out_dir, "config_path and out_dir required");
    const auto res = reachlab::run_train(config_path, out_dir, seed, workers,
                                         resume_checkpoint ? resume_checkpoint : "",
                                         transfer_checkpoint ? transfer_checkpoint : "");
    if (summary_json_out) *summary_json_out = dup_string(res.summary_json);
  });
}

rlab_status rlab_eval(const char* config_path, const char* checkpoint, uint64_t seed,
                      int32_t workers, const char* out_dir, char** metrics_json_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && checkpoint, "config_path and checkpoint required");
    const auto outcome = reachlab::run_eval(config_path, checkpoint, seed, workers,
                                            out_dir ? out_dir : "");
    if (metrics_json_out) *metrics_json_out = dup_string(outcome.table.to_json());
  });
}

rlab_status rlab_baseline(const char* config_path, const char* controller, uint64_t seed,
                          int32_t workers, const char* out_dir,
                          char** metrics_json_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && controller, "config_path and controller required");
    const auto outcome = reachlab::run_baseline(config_path, controller, seed, workers,
                                                out_dir ? out_dir : "");
    if (metrics_json_out) *metrics_json_out = dup_string(outcome.table.to_json());
  });
}

rlab_status rlab_obstacle_eval(const char* config_path, const char* checkpoint,
                               int32_t obstacle_count, uint64_t seed, int32_t workers,
                               const char* out_dir, const char* replay_scenes,
                               char** metrics_json_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && checkpoint, "config_path and checkpoint required");
    const auto outcome = reachlab::run_obstacle_eval(
        config_path, checkpoint, obstacle_count, seed, workers, out_dir ? out_dir : "",
        replay_scenes ? replay_scenes : "");
    if (metrics_json_out) *metrics_json_out = dup_string(outcome.table.to_json());
  });
}

rlab_status rlab_demo(const char* config_path, const char* checkpoint,
                      const double* start_q, int32_t start_q_len, const double* goal_xyz,
                      const char* trace_csv_path, double* final_error_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && checkpoint && goal_xyz && trace_csv_path,
                        "null argument");
    const reachlab::VecX q0 =
        start_q ? to_vec(start_q, start_q_len) : reachlab::VecX();
    const reachlab::Vec3 goal(goal_xyz[0], goal_xyz[1], goal_xyz[2]);
    const double err =
        reachlab::run_demo_cmd(config_path, checkpoint, q0, goal, trace_csv_path);
    if (final_error_out) *final_error_out = err;
  });
}

rlab_status rlab_ablate_curriculum(const char* config_path, const char* out_dir,
                                   uint64_t seed, int32_t workers,
                                   char** summary_json_out) {
  return guarded([&] {
    reachlab::check_arg(config_path && out_dir, "config_path and out_dir required");
    const auto res = reachlab::run_ablation(config_path, out_dir, seed, workers);
    if (summary_json_out) *summary_json_out = dup_string(res.summary_json);
  });
}

}  // extern "C"
