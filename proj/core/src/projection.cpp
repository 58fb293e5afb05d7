// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/projection.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/LU>

#include "suction/digest.hpp"
#include "suction/errors.hpp"

namespace suction {

namespace {

json vec3_to_json(const Vec3& v) { return json{v.x(), v.y(), v.z()}; }

Vec3 vec3_from_json(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

}  // namespace

bool RigidTransform::is_valid(double tol) const {
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

void RigidTransform::validate(double tol) const {
  if (!is_valid(tol)) {
    throw ConfigError(
        "transform: rotation must be orthonormal with determinant +1");
  }
}

RigidTransform RigidTransform::from_json(const json& j) {
  RigidTransform xf;
  const auto& rot = j.at("rotation");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      xf.rotation(r, c) = rot.at(static_cast<std::size_t>(r))
                              .at(static_cast<std::size_t>(c))
                              .get<double>();
    }
  }
  xf.translation = vec3_from_json(j.at("translation"));
  xf.validate(1e-6);  // configs are hand-written; allow rounded entries
  return xf;
}

json RigidTransform::to_json() const {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    rot.push_back({rotation(r, 0), rotation(r, 1), rotation(r, 2)});
  }
  return json{{"rotation", rot}, {"translation", vec3_to_json(translation)}};
}

RigidTransform load_transform(const std::filesystem::path& path) {
  return RigidTransform::from_json(load_json_file(path));
}

json SuctionCandidate::to_json() const {
  json j{{"label", label},
         {"point_camera", vec3_to_json(point_camera)},
         {"normal_camera", vec3_to_json(normal_camera)},
         {"pixel", {pixel.u, pixel.v}},
         {"point_robot", vec3_to_json(point_robot)},
         {"normal_robot", vec3_to_json(normal_robot)}};
  if (scores) j["scores"] = scores->to_json();
  return j;
}

SuctionCandidate SuctionCandidate::from_json(const json& j) {
  SuctionCandidate c;
  c.label = j.at("label").get<int>();
  c.point_camera = vec3_from_json(j.at("point_camera"));
  c.normal_camera = vec3_from_json(j.at("normal_camera"));
  c.pixel.u = j.at("pixel").at(0).get<double>();
  c.pixel.v = j.at("pixel").at(1).get<double>();
  c.point_robot = vec3_from_json(j.at("point_robot"));
  c.normal_robot = vec3_from_json(j.at("normal_robot"));
  if (j.contains("scores")) {
    c.scores = GeometricScores::from_json(j.at("scores"));
  }
  return c;
}

PixelPoint project_to_pixel(const Vec3& point, const CameraIntrinsics& intr) {
  if (point.z() <= 0.0) {
    throw std::invalid_argument("project_to_pixel: point.z must be > 0");
  }
  return PixelPoint{intr.fx * point.x() / point.z() + intr.cx,
                    intr.fy * point.y() / point.z() + intr.cy};
}

Vec3 to_robot_frame(const Vec3& point, const RigidTransform& xf) {
  return xf.apply_point(point);
}

std::vector<SuctionCandidate> build_candidates(
    const std::vector<Cluster>& clusters, const CameraIntrinsics& intr,
    const RigidTransform& camera_to_robot) {
  std::vector<SuctionCandidate> out;
  out.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    if (!cluster.suctionable()) continue;
    if (cluster.centroid.z() <= 0.0) continue;
    const PixelPoint px = project_to_pixel(cluster.centroid, intr);
    if (px.u < 0.0 || px.u >= intr.width || px.v < 0.0 ||
        px.v >= intr.height) {
      continue;
    }
    SuctionCandidate cand;
    cand.point_camera = cluster.centroid;
    cand.normal_camera = *cluster.normal;
    cand.pixel = px;
    cand.point_robot = camera_to_robot.apply_point(cluster.centroid);
    cand.normal_robot =
        camera_to_robot.apply_vector(*cluster.normal).normalized();
    out.push_back(std::move(cand));
  }

  std::sort(out.begin(), out.end(),
            [](const SuctionCandidate& a, const SuctionCandidate& b) {
              if (a.pixel.v != b.pixel.v) return a.pixel.v < b.pixel.v;
              if (a.pixel.u != b.pixel.u) return a.pixel.u < b.pixel.u;
              return a.point_camera.z() < b.point_camera.z();
            });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].label = static_cast<int>(i) + 1;
  }
  return out;
}

json candidates_to_json(const std::vector<SuctionCandidate>& candidates) {
  json arr = json::array();
  for (const SuctionCandidate& c : candidates) arr.push_back(c.to_json());
  return json{{"candidates", arr}, {"digest", candidates_digest(candidates)}};
}

std::vector<SuctionCandidate> candidates_from_json(const json& j) {
  std::vector<SuctionCandidate> out;
  for (const json& c : j.at("candidates")) {
    out.push_back(SuctionCandidate::from_json(c));
  }
  return out;
}

std::string candidates_digest(
    const std::vector<SuctionCandidate>& candidates) {
  Fnv1a hash;
  for (const SuctionCandidate& c : candidates) {
    hash.update_i32(c.label);
    hash.update_f64(c.pixel.u).update_f64(c.pixel.v);
    for (int i = 0; i < 3; ++i) {
      hash.update_f64(c.point_camera[i]);
      hash.update_f64(c.normal_camera[i]);
      hash.update_f64(c.point_robot[i]);
    }
  }
  return hash.hex();
}

}  // namespace suction
