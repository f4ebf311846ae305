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

#include <string>

#include "reachlab/arm_model.hpp"
#include "reachlab/rng.hpp"

#ifndef REACHLAB_SOURCE_DIR
#define REACHLAB_SOURCE_DIR "."
#endif

namespace reachlab::testing {

inline std::string source_path(const std::string& rel) {
  return std::string(REACHLAB_SOURCE_DIR) + "/" + rel;
}

inline ArmModel planar2() { return load_model(source_path("models/planar2.model")); }
inline ArmModel spatial6() { return load_model(source_path("models/spatial6.model")); }

// q drawn uniformly inside the limits, margin away from the boundary.
inline VecX random_q(const ArmModel& model, Rng& rng, double margin_fraction = 0.1) {
  VecX q(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const auto& j = model.joints[i];
    const double span = j.limit_upper - j.limit_lower;
    q[i] = rng.uniform(j.limit_lower + margin_fraction * span,
                       j.limit_upper - margin_fraction * span);
  }
  return q;
}

inline VecX random_vec(int n, Rng& rng, double scale = 1.0) {
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

}  // namespace reachlab::testing
