// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "suction/clustering.hpp"
#include "suction/rgbd.hpp"
#include "suction/scores.hpp"

namespace suction {

/// Rotation + translation between the camera and robot frames.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply_point(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  RigidTransform compose(const RigidTransform& then_apply_first) const {
    RigidTransform out;
    out.rotation = rotation * then_apply_first.rotation;
    out.translation = rotation * then_apply_first.translation + translation;
    return out;
  }

  bool is_valid(double tol = 1e-9) const;
  void validate(double tol = 1e-9) const;

  static RigidTransform from_json(const json& j);
  json to_json() const;
};

RigidTransform load_transform(const std::filesystem::path& path);

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

/// One labeled suction candidate: 3D point + unit normal in camera and
/// robot frames, its pixel projection, and (once the oracle has run)
/// geometric scores. Labels are 1-based and contiguous in a set.
struct SuctionCandidate {
  int label = 0;
  Vec3 point_camera = Vec3::Zero();
  Vec3 normal_camera = Vec3::UnitZ();
  PixelPoint pixel;
  Vec3 point_robot = Vec3::Zero();
  Vec3 normal_robot = Vec3::UnitZ();
  std::optional<GeometricScores> scores;

  json to_json() const;
  static SuctionCandidate from_json(const json& j);
};

/// Pinhole projection with perspective division:
/// u = fx x / z + cx, v = fy y / z + cy. Throws std::invalid_argument
/// for z <= 0.
PixelPoint project_to_pixel(const Vec3& point, const CameraIntrinsics& intr);

Vec3 to_robot_frame(const Vec3& point, const RigidTransform& xf);

/// Turn suctionable clusters into labeled candidates. Clusters without a
/// normal, behind the camera, or projecting outside the image are dropped;
/// survivors are relabeled 1..m in raster order (ascending v, then u).
std::vector<SuctionCandidate> build_candidates(
    const std::vector<Cluster>& clusters, const CameraIntrinsics& intr,
    const RigidTransform& camera_to_robot);

json candidates_to_json(const std::vector<SuctionCandidate>& candidates);
std::vector<SuctionCandidate> candidates_from_json(const json& j);

/// Order-sensitive digest of labels, pixels and 3D points; identifies a
/// candidate set in episode and replay logs.
std::string candidates_digest(const std::vector<SuctionCandidate>& candidates);

}  // namespace suction
