/* Copyright 2026 The reachlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef REACHLAB_H_
#define REACHLAB_H_

/* C API of the reachlab shared library: opaque handles plus status codes.
 * Every function returns RLAB_OK (0) on success or a negative status; the
 * thread-local message from rlab_last_error() describes the most recent
 * failure on the calling thread.  Strings returned through `char**` out
 * parameters are heap-allocated and must be released with rlab_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RLAB_API __declspec(dllexport)
#else
#define RLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t rlab_status;

enum {
  RLAB_OK = 0,
  RLAB_ERR_INVALID_ARGUMENT = -1,
  RLAB_ERR_PARSE = -2,
  RLAB_ERR_IO = -3,
  RLAB_ERR_NUMERIC = -4,
  RLAB_ERR_INTERNAL = -5
};

RLAB_API const char* rlab_version(void);
RLAB_API const char* rlab_last_error(void);
RLAB_API void rlab_string_free(char* s);

/* ---- arm models ---------------------------------------------------------- */

typedef struct rlab_model rlab_model;

RLAB_API rlab_status rlab_model_load(const char* path, rlab_model** out);
RLAB_API rlab_status rlab_model_parse(const char* text, rlab_model** out);
RLAB_API void rlab_model_free(rlab_model* model);
RLAB_API int32_t rlab_model_dof(const rlab_model* model);

/* q has dof entries. out_xyz receives the end-effector position. */
RLAB_API rlab_status rlab_model_ee_position(const rlab_model* model, const double* q,
                                            double out_xyz[3]);
/* Row-major 3 x dof position Jacobian. */
RLAB_API rlab_status rlab_model_jacobian(const rlab_model* model, const double* q,
                                         double* out_3xn);
/* Row-major dof x dof mass matrix. */
RLAB_API rlab_status rlab_model_mass_matrix(const rlab_model* model, const double* q,
                                            double* out_nxn);
/* Coriolis torques C(q,qd) qd and gravity torques g(q), dof entries each;
 * either output may be NULL. */
RLAB_API rlab_status rlab_model_bias_forces(const rlab_model* model, const double* q,
                                            const double* qdot, double* coriolis_out,
                                            double* gravity_out);

/* ---- config-driven runs --------------------------------------------------- */

/* Trains per the run config; writes checkpoints and metrics.jsonl under
 * out_dir.  resume_checkpoint / transfer_checkpoint may be NULL.  On success
 * *summary_json_out (optional) receives a summary object. */
RLAB_API rlab_status rlab_train(const char* config_path, const char* out_dir,
                                uint64_t seed, int32_t workers,
                                const char* resume_checkpoint,
                                const char* transfer_checkpoint,
                                char** summary_json_out);

/* Sequential-goal evaluation of a trained policy over the final curriculum
 * region; metrics JSON lands in *metrics_json_out.  out_dir may be NULL. */
RLAB_API rlab_status rlab_eval(const char* config_path, const char* checkpoint,
                               uint64_t seed, int32_t workers, const char* out_dir,
                               char** metrics_json_out);

/* controller: "osc-v" or "osc-a". */
RLAB_API rlab_status rlab_baseline(const char* config_path, const char* controller,
                                   uint64_t seed, int32_t workers, const char* out_dir,
                                   char** metrics_json_out);

/* obstacle_count in 1..3; replay_scenes (optional) reruns recorded scenes. */
RLAB_API rlab_status rlab_obstacle_eval(const char* config_path, const char* checkpoint,
                                        int32_t obstacle_count, uint64_t seed,
                                        int32_t workers, const char* out_dir,
                                        const char* replay_scenes,
                                        char** metrics_json_out);

/* Single reach writing a trajectory trace CSV.  start_q may be NULL for the
 * configured home pose; goal_xyz has 3 entries.  final_error_out optional. */
RLAB_API rlab_status rlab_demo(const char* config_path, const char* checkpoint,
                               const double* start_q, int32_t start_q_len,
                               const double* goal_xyz, const char* trace_csv_path,
                               double* final_error_out);

/* Curriculum-versus-no-curriculum twin training runs at equal budgets. */
RLAB_API rlab_status rlab_ablate_curriculum(const char* config_path,
                                            const char* out_dir, uint64_t seed,
                                            int32_t workers, char** summary_json_out);

#ifdef __cplusplus
}
#endif

#endif /* REACHLAB_H_ */
