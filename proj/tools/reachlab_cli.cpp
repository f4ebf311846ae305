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

// Command-line front end.  Links only the extern-C API of libreachlab; the
// human-readable tables are rendered from the same JSON the library returns,
// so the two outputs cannot drift apart.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reachlab.h"

namespace {

int fail_with(rlab_status status) {
  std::fprintf(stderr, "error (%d): %s\n", status, rlab_last_error());
  return 1;
}

void print_metrics_table(const std::string& metrics_json) {
  const auto j = nlohmann::json::parse(metrics_json);
  auto row = [&](const char* key) {
    if (!j.contains(key) || j[key].is_null()) return;
    if (j[key].is_number_integer())
      std::printf("%-22s %ld\n", key, long(j[key].get<int64_t>()));
    else
      std::printf("%-22s %.6g\n", key, j[key].get<double>());
  };
  row("trials");
  row("settled");
  row("success_rate");
  row("average_error_m");
  row("average_error_all_m");
  row("completion_mean_s");
  row("completion_std_s");
  row("collision_free_rate");
  row("grazing_mean");
  row("grazing_std");
  std::printf("%s\n", metrics_json.c_str());
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  std::string token;
  for (char c : csv + ",") {
    if (c == ',' || c == ' ') {
      if (!token.empty()) out.push_back(std::stod(token));
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reachlab: learned and analytic reaching controllers for serial arms"};
  app.require_subcommand(1);

  std::string config;
  uint64_t seed = 1;
  std::string out_dir;
  int workers = 1;
  app.add_option("--config", config, "run config file")->required();
  app.add_option("--seed", seed, "rng seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads");

  auto* cmd_train = app.add_subcommand("train", "train a reaching policy");
  std::string resume, transfer;
  cmd_train->add_option("--resume", resume, "checkpoint to continue from");
  cmd_train->add_option("--transfer", transfer,
                        "checkpoint to widen for obstacle-aware training");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a trained policy");
  std::string checkpoint;
  cmd_eval->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();

  auto* cmd_baseline =
      app.add_subcommand("baseline", "evaluate an analytic controller");
  std::string controller = "osc-a";
  cmd_baseline->add_option("--controller", controller, "osc-v or osc-a");

  auto* cmd_obstacle =
      app.add_subcommand("obstacle-eval", "evaluate among random obstacles");
  int obstacles = 1;
  std::string replay;
  cmd_obstacle->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  cmd_obstacle->add_option("--obstacles", obstacles, "spheres per trial (1..3)");
  cmd_obstacle->add_option("--replay", replay, "scene JSONL to rerun exactly");

  auto* cmd_demo = app.add_subcommand("demo", "single reach, trajectory CSV");
  std::string start_csv, goal_csv, trace_path = "trace.csv";
  cmd_demo->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  cmd_demo->add_option("--start", start_csv, "start joint angles, comma separated");
  cmd_demo->add_option("--goal", goal_csv, "goal x,y,z")->required();
  cmd_demo->add_option("--trace", trace_path, "output CSV path");

  auto* cmd_ablate = app.add_subcommand(
      "ablate-curriculum", "curriculum vs no-curriculum at equal budget");

  CLI11_PARSE(app, argc, argv);

  if (cmd_train->parsed()) {
    const std::string out = out_dir.empty() ? "run" : out_dir;
    char* summary = nullptr;
    const rlab_status st =
        rlab_train(config.c_str(), out.c_str(), seed, workers,
                   resume.empty() ? nullptr : resume.c_str(),
                   transfer.empty() ? nullptr : transfer.c_str(), &summary);
    if (st != RLAB_OK) return fail_with(st);
    std::printf("%s\n", summary);
    rlab_string_free(summary);
    return 0;
  }

  if (cmd_eval->parsed()) {
    char* metrics = nullptr;
    const rlab_status st =
        rlab_eval(config.c_str(), checkpoint.c_str(), seed, workers,
                  out_dir.empty() ? nullptr : out_dir.c_str(), &metrics);
    if (st != RLAB_OK) return fail_with(st);
    print_metrics_table(metrics);
    rlab_string_free(metrics);
    return 0;
  }

  if (cmd_baseline->parsed()) {
    char* metrics = nullptr;
    const rlab_status st =
        rlab_baseline(config.c_str(), controller.c_str(), seed, workers,
                      out_dir.empty() ? nullptr : out_dir.c_str(), &metrics);
    if (st != RLAB_OK) return fail_with(st);
    print_metrics_table(metrics);
    rlab_string_free(metrics);
    return 0;
  }

  if (cmd_obstacle->parsed()) {
    char* metrics = nullptr;
    const rlab_status st = rlab_obstacle_eval(
        config.c_str(), checkpoint.c_str(), obstacles, seed, workers,
        out_dir.empty() ? nullptr : out_dir.c_str(),
        replay.empty() ? nullptr : replay.c_str(), &metrics);
    if (st != RLAB_OK) return fail_with(st);
    print_metrics_table(metrics);
    rlab_string_free(metrics);
    return 0;
  }

  if (cmd_demo->parsed()) {
    const std::vector<double> goal = parse_number_list(goal_csv);
    if (goal.size() != 3) {
      std::fprintf(stderr, "--goal needs exactly x,y,z\n");
      return 1;
    }
    const std::vector<double> start = parse_number_list(start_csv);
    double final_error = 0.0;
    const rlab_status st = rlab_demo(
        config.c_str(), checkpoint.c_str(), start.empty() ? nullptr : start.data(),
        int32_t(start.size()), goal.data(), trace_path.c_str(), &final_error);
    if (st != RLAB_OK) return fail_with(st);
    std::printf("trace written to %s, final error %.6f m\n", trace_path.c_str(),
                final_error);
    return 0;
  }

  if (cmd_ablate->parsed()) {
    const std::string out = out_dir.empty() ? "ablation" : out_dir;
    char* summary = nullptr;
    const rlab_status st =
        rlab_ablate_curriculum(config.c_str(), out.c_str(), seed, workers, &summary);
    if (st != RLAB_OK) return fail_with(st);
    std::printf("%s\n", summary);
    rlab_string_free(summary);
    return 0;
  }
  return 0;
}
