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

#include "reachlab/obstacle_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace reachlab {
namespace {

constexpr double kDegenerate = 1e-12;

struct SurfaceHit {
  double separation = std::numeric_limits<double>::infinity();
  Vec3 direction = Vec3::UnitX();  // unit, from link sphere center toward obstacle
};

SurfaceHit sphere_vs_sphere(const SphereState& link, const SphereObstacle& obs) {
  SurfaceHit hit;
  const Vec3 delta = obs.center - link.center;
  const double dist = delta.norm();
  hit.separation = dist - link.radius - obs.radius;
  hit.direction = dist > kDegenerate ? Vec3(delta / dist) : Vec3::UnitX();
  return hit;
}

SurfaceHit sphere_vs_box(const SphereState& link, const BoxObstacle& obs) {
  SurfaceHit hit;
  const Vec3 local = link.center - obs.center;
  const Vec3 clamped = local.cwiseMax(-obs.half_extents).cwiseMin(obs.half_extents);
  if ((local - clamped).norm() > kDegenerate) {
    // Center outside the box: closest point is the clamp.
    const Vec3 delta = clamped - local;
    hit.separation = delta.norm() - link.radius;
    hit.direction = delta.normalized();
  } else {
    // Center inside: walk out through the nearest face.
    int face = 0;
    double depth = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      const double to_face = obs.half_extents[k] - std::abs(local[k]);
      if (to_face < depth) {
        depth = to_face;
        face = k;
      }
    }
    hit.separation = -depth - link.radius;
    // Points toward the box interior so d = separation * direction lands on
    // the outward face normal.
    Vec3 dir = Vec3::Zero();
    dir[face] = local[face] >= 0 ? 1.0 : -1.0;
    hit.direction = -dir;
  }
  return hit;
}

SurfaceHit sphere_vs_capsule(const SphereState& link, const CapsuleObstacle& obs) {
  SurfaceHit hit;
  const Vec3 ab = obs.b - obs.a;
  const double len2 = ab.squaredNorm();
  double t = len2 > kDegenerate ? (link.center - obs.a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec3 closest = obs.a + t * ab;
  const Vec3 delta = closest - link.center;
  const double dist = delta.norm();
  hit.separation = dist - link.radius - obs.radius;
  hit.direction = dist > kDegenerate ? Vec3(delta / dist) : Vec3::UnitX();
  return hit;
}

}  // namespace

ObstacleSet parse_scene(const TextNode& scene) {
  ObstacleSet set;
  for (const TextNode* n : scene.find_all("sphere_obstacle")) {
    SphereObstacle o;
    o.center = n->vec3("center");
    o.radius = n->num("radius");
    check(o.radius > 0, ErrorCode::kParse, n->location() + ": radius must be positive");
    set.spheres.push_back(o);
  }
  for (const TextNode* n : scene.find_all("box_obstacle")) {
    BoxObstacle o;
    o.center = n->vec3("center");
    o.half_extents = n->vec3("half_extents");
    check(o.half_extents.minCoeff() > 0, ErrorCode::kParse,
          n->location() + ": half extents must be positive");
    set.boxes.push_back(o);
  }
  for (const TextNode* n : scene.find_all("capsule_obstacle")) {
    CapsuleObstacle o;
    o.a = n->vec3("a");
    o.b = n->vec3("b");
    o.radius = n->num("radius");
    check(o.radius > 0, ErrorCode::kParse, n->location() + ": radius must be positive");
    set.capsules.push_back(o);
  }
  return set;
}

ObstacleSet load_scene(const std::string& path) {
  const TextNode root = parse_text_file(path, "reachlab-scene");
  return parse_scene(root.require("scene"));
}

double DistanceVectors::min_separation() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : per_link) m = std::min(m, l.separation);
  return m;
}

DistanceVectors closest_points(const std::vector<SphereState>& link_spheres,
                               const ObstacleSet& obstacles) {
  // One result per distinct link, in ascending link order.
  std::map<int, LinkDistance> best;
  for (const auto& sphere : link_spheres) {
    LinkDistance& entry = best.try_emplace(sphere.link).first->second;
    entry.link = sphere.link;

    SurfaceHit nearest;
    int nearest_idx = -1;
    int idx = 0;
    auto consider = [&](const SurfaceHit& hit) {
      if (hit.separation < nearest.separation) {
        nearest = hit;
        nearest_idx = idx;
      }
      ++idx;
    };
    for (const auto& o : obstacles.spheres) consider(sphere_vs_sphere(sphere, o));
    for (const auto& o : obstacles.boxes) consider(sphere_vs_box(sphere, o));
    for (const auto& o : obstacles.capsules) consider(sphere_vs_capsule(sphere, o));

    if (nearest_idx >= 0 && nearest.separation < entry.separation &&
        nearest.separation <= kFarSentinelDistance) {
      entry.separation = nearest.separation;
      entry.d = nearest.separation * nearest.direction;
      entry.obstacle = nearest_idx;
      entry.link_point_velocity = sphere.velocity;
    }
  }

  DistanceVectors out;
  out.per_link.reserve(best.size());
  for (auto& [link, entry] : best) out.per_link.push_back(entry);
  return out;
}

double obstacle_penalty(double separation, double d_max) {
  check_arg(d_max > 0, "d_max must be positive");
  return std::max(0.0, 1.0 - std::max(separation, 0.0) / d_max);
}

PenaltySummary obstacle_penalties(const DistanceVectors& d, double d_max) {
  PenaltySummary out;
  out.psi.reserve(d.per_link.size());
  for (const auto& l : d.per_link) {
    const double psi = obstacle_penalty(l.separation, d_max);
    out.psi.push_back(psi);
    out.total += psi;
  }
  return out;
}

std::optional<double> grazing_ratio(const Vec3& link_point_velocity, const Vec3& normal) {
  const Vec3 n = normal.norm() > kDegenerate ? Vec3(normal.normalized()) : Vec3::UnitX();
  const double v_normal = std::abs(link_point_velocity.dot(n));
  const double v_tangential = (link_point_velocity - link_point_velocity.dot(n) * n).norm();
  if (v_tangential < 1e-6) return std::nullopt;
  return std::min(v_normal / v_tangential, 100.0);
}

void GrazingTracker::observe(const DistanceVectors& d) {
  for (size_t i = 0; i < d.per_link.size() && i < prev_separation_.size(); ++i) {
    const LinkDistance& l = d.per_link[i];
    if (prev_separation_[i] > 0.0 && l.separation <= 0.0) {
      ++touch_events_;
      if (auto r = grazing_ratio(l.link_point_velocity, l.d.norm() > kDegenerate
                                                            ? Vec3(l.d.normalized())
                                                            : Vec3::UnitX()))
        ratios_.push_back(*r);
    }
    prev_separation_[i] = l.separation;
  }
}

}  // namespace reachlab
