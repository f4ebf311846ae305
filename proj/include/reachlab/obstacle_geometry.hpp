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

// Per-link closest-point distance vectors to the obstacle set, the proximity
// penalty ramp, and grazing diagnostics at touch events.  All pure functions.

#include <vector>

#include "reachlab/arm_model.hpp"
#include "reachlab/text_format.hpp"

namespace reachlab {

struct SphereObstacle {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct BoxObstacle {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Zero();
};

struct CapsuleObstacle {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;
};

struct ObstacleSet {
  std::vector<SphereObstacle> spheres;
  std::vector<BoxObstacle> boxes;
  std::vector<CapsuleObstacle> capsules;

  bool empty() const { return spheres.empty() && boxes.empty() && capsules.empty(); }
  size_t size() const { return spheres.size() + boxes.size() + capsules.size(); }
};

// Reads a `scene { ... }` block (same text format as model files).
ObstacleSet parse_scene(const TextNode& scene);
ObstacleSet load_scene(const std::string& path);

// Beyond this surface separation a link reports the fixed far sentinel
// (+z scaled to 1 m), keeping the observation dimension and range bounded.
inline constexpr double kFarSentinelDistance = 1.0;

struct LinkDistance {
  int link = 0;
  Vec3 d = Vec3(0, 0, kFarSentinelDistance);  // link surface -> obstacle surface
  double separation = kFarSentinelDistance;   // negative when penetrating
  int obstacle = -1;                          // flat obstacle index, -1 = none near
  Vec3 link_point_velocity = Vec3::Zero();    // closest sphere center velocity
};

struct DistanceVectors {
  std::vector<LinkDistance> per_link;  // one entry per link that carries spheres

  double min_separation() const;
  bool any_penetration() const { return min_separation() < 0.0; }
};

// For each link (minimum over its collision spheres and all obstacles):
// d = separation * n, with n the unit vector from the link sphere center
// toward the obstacle, so penetration flips d onto the obstacle's outward
// normal.  Degenerate zero directions tie-break to +x; equidistant obstacles
// tie-break to the lowest index.  Links farther than the sentinel distance
// from everything report the sentinel.
DistanceVectors closest_points(const std::vector<SphereState>& link_spheres,
                               const ObstacleSet& obstacles);

// psi_i = max(0, 1 - max(separation, 0) / d_max); contact and penetration
// both saturate at 1.
double obstacle_penalty(double separation, double d_max);

struct PenaltySummary {
  std::vector<double> psi;  // aligned with DistanceVectors::per_link
  double total = 0.0;
};
PenaltySummary obstacle_penalties(const DistanceVectors& d, double d_max);

// Normal-to-tangential speed ratio of the closest link point relative to the
// obstacle at a touch, capped at 100; no value when the tangential speed is
// below 1e-6 m/s.
std::optional<double> grazing_ratio(const Vec3& link_point_velocity, const Vec3& normal);

// Streams per-tick distance results and records a grazing ratio at every
// first-touch event (separation crossing <= 0 on some link).
class GrazingTracker {
 public:
  explicit GrazingTracker(size_t link_count)
      : prev_separation_(link_count, kFarSentinelDistance) {}

  void observe(const DistanceVectors& d);
  const std::vector<double>& ratios() const { return ratios_; }
  int touch_events() const { return touch_events_; }

 private:
  std::vector<double> prev_separation_;
  std::vector<double> ratios_;
  int touch_events_ = 0;
};

}  // namespace reachlab
