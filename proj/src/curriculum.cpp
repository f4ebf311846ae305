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

#include "reachlab/curriculum.hpp"

#include <cmath>

namespace reachlab {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Rotation taking the region axis to +z, so membership tests run in a frame
// where the center circle lies in the x-y plane.
Mat3 axis_frame(const Vec3& axis) {
  const Vec3 z = axis.normalized();
  return Eigen::Quaterniond::FromTwoVectors(z, Vec3::UnitZ()).toRotationMatrix();
}

}  // namespace

CurriculumRegion CurriculumRegion::partial_torus(double major, double minor,
                                                 double sweep, const Vec3& center,
                                                 bool planar) {
  CurriculumRegion r;
  r.shape = Shape::kPartialTorus;
  r.major_radius = major;
  r.minor_radius = minor;
  r.sweep_angle = sweep;
  r.center = center;
  r.planar = planar;
  r.validate();
  return r;
}

CurriculumRegion CurriculumRegion::box(const Vec3& center, const Vec3& extents) {
  CurriculumRegion r;
  r.shape = Shape::kBox;
  r.center = center;
  r.extents = extents;
  r.validate();
  return r;
}

void CurriculumRegion::validate() const {
  if (shape == Shape::kPartialTorus) {
    check_arg(major_radius > 0 && minor_radius > 0, "torus radii must be positive");
    check_arg(sweep_angle > 0 && sweep_angle <= kTwoPi + 1e-12,
              "sweep angle must be in (0, 2*pi]");
    check_arg(axis.norm() > 1e-9, "torus axis must be nonzero");
  } else {
    check_arg(extents.minCoeff() > 0, "box extents must be positive");
  }
}

double CurriculumRegion::span() const {
  if (shape == Shape::kPartialTorus)
    return 2.0 * (major_radius + minor_radius);
  return 2.0 * extents.norm();
}

double CurriculumRegion::max_distance_from_origin() const {
  if (shape == Shape::kPartialTorus)
    return center.norm() + major_radius + minor_radius;
  return center.norm() + extents.norm();
}

bool region_contains(const CurriculumRegion& region, const Vec3& point) {
  if (region.shape == CurriculumRegion::Shape::kBox) {
    const Vec3 local = point - region.center;
    return (local.cwiseAbs().array() <= region.extents.array() + 1e-12).all();
  }
  const Vec3 local = axis_frame(region.axis) * (point - region.center);
  if (region.planar && std::abs(local.z()) > 1e-9) return false;
  const double rho = std::hypot(local.x(), local.y());
  const double tube = std::hypot(rho - region.major_radius, local.z());
  if (tube > region.minor_radius) return false;
  const double azimuth = std::atan2(local.y(), local.x());
  return std::abs(azimuth) <= region.sweep_angle / 2.0 + 1e-12;
}

Vec3 sample_goal(const CurriculumRegion& region, Rng& rng) {
  const bool is_torus = region.shape == CurriculumRegion::Shape::kPartialTorus;
  // Bounding box in the region's own frame (axis frame for tori).
  Vec3 lo, hi;
  if (is_torus) {
    const double r = region.major_radius + region.minor_radius;
    const double z = region.planar ? 0.0 : region.minor_radius;
    lo = Vec3(-r, -r, -z);
    hi = Vec3(r, r, z);
  } else {
    lo = -region.extents;
    hi = region.extents;
  }
  const Mat3 from_axis =
      is_torus ? Mat3(axis_frame(region.axis).transpose()) : Mat3::Identity();

  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec3 u;
    for (int k = 0; k < 3; ++k)
      u[k] = lo[k] == hi[k] ? lo[k] : rng.uniform(lo[k], hi[k]);
    const Vec3 p = region.center + from_axis * u;
    if (region_contains(region, p)) return p;
  }
  fail(ErrorCode::kNumeric, "goal sampling exceeded the rejection budget");
}

void CurriculumSchedule::validate_nesting(Rng& rng, int samples) const {
  check_arg(!regions.empty(), "curriculum needs at least one region");
  check_arg(threshold > 0, "curriculum threshold must be positive");
  for (size_t i = 0; i + 1 < regions.size(); ++i) {
    for (int s = 0; s < samples; ++s) {
      const Vec3 p = sample_goal(regions[i], rng);
      check_arg(region_contains(regions[i + 1], p),
                "curriculum region " + std::to_string(i + 2) +
                    " does not contain region " + std::to_string(i + 1));
    }
  }
}

int advance_curriculum(const CurriculumSchedule& schedule, double avg_error,
                       int current_index) {
  check_arg(current_index >= 0 &&
                current_index < static_cast<int>(schedule.regions.size()),
            "curriculum index out of range");
  if (avg_error < schedule.threshold &&
      current_index + 1 < static_cast<int>(schedule.regions.size()))
    return current_index + 1;
  return current_index;
}

}  // namespace reachlab
