// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include "suction/json_util.hpp"

namespace suction {

using Vec3 = Eigen::Vector3d;

/// Axis-aligned box, min < max componentwise. Used for workspace crops
/// and interpenetration checks.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
  }

  bool overlaps(const Aabb& other) const {
    return min.x() <= other.max.x() && max.x() >= other.min.x() &&
           min.y() <= other.max.y() && max.y() >= other.min.y() &&
           min.z() <= other.max.z() && max.z() >= other.min.z();
  }

  void validate() const;

  static Aabb from_json(const json& j);
  json to_json() const;
};

}  // namespace suction
