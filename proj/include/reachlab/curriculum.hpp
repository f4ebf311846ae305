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

// Goal regions for curriculum learning: nested partial tori (surfaces of
// revolution swept less than a full turn) or boxes.  A planar partial torus
// is the z = 0 slice, i.e. an annular sector, used with planar arms.

#include <vector>

#include "reachlab/common.hpp"
#include "reachlab/rng.hpp"

namespace reachlab {

struct CurriculumRegion {
  enum class Shape { kPartialTorus, kBox };
  Shape shape = Shape::kPartialTorus;

  // Partial torus: center circle of major_radius in the plane through
  // `center` orthogonal to `axis`; tube radius minor_radius; azimuth within
  // [-sweep_angle/2, +sweep_angle/2] measured from the +x direction.
  double major_radius = 0.0;
  double minor_radius = 0.0;
  double sweep_angle = 0.0;  // rad, (0, 2*pi]
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  bool planar = false;       // restrict to the z = 0 slice of the tube

  // Box: axis-aligned, half-widths `extents`.
  Vec3 extents = Vec3::Zero();

  static CurriculumRegion partial_torus(double major, double minor, double sweep,
                                        const Vec3& center = Vec3::Zero(),
                                        bool planar = false);
  static CurriculumRegion box(const Vec3& center, const Vec3& extents);

  void validate() const;
  // Extent of the region (outer diameter for tori), used for
  // percent-of-span metrics and reachability checks.
  double span() const;
  // Farthest point distance from the world origin.
  double max_distance_from_origin() const;
};

bool region_contains(const CurriculumRegion& region, const Vec3& point);

// Uniform over the region volume (area for planar regions) by rejection from
// the bounding box; throws after 1e5 rejected draws.
Vec3 sample_goal(const CurriculumRegion& region, Rng& rng);

struct CurriculumSchedule {
  std::vector<CurriculumRegion> regions;  // R_1 subset ... subset R_k
  double threshold = 0.01;                // m, advance when avg error drops below
  int eval_cadence = 10;                  // updates between error measurements
  int eval_episodes = 50;

  // Verifies nesting by sampling `samples` points from each region and
  // testing membership in the next.
  void validate_nesting(Rng& rng, int samples = 1000) const;
};

// index + 1 iff avg_error < threshold and another region exists; 0-based.
int advance_curriculum(const CurriculumSchedule& schedule, double avg_error,
                       int current_index);

}  // namespace reachlab
