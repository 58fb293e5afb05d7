// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "suction/executor.hpp"
#include "suction/projection.hpp"
#include "suction/random.hpp"
#include "suction/rgbd.hpp"

namespace suction {

// World frame: +x right, +y into the shelf, +z up. The support plane is
// z = 0, the back wall is y = shelf.depth. Objects rest on the support.

enum class ObjectKind { kBox, kBag };

std::string to_string(ObjectKind k);
ObjectKind object_kind_from_string(const std::string& s);

/// Front-face surface model. Boxes are flat and rigid. Bags carry a
/// sinusoidal height-field recessed into the local -y face:
///   d(x', z') = amplitude * sin(2 pi p x'/X) * sin(2 pi q z'/Z)
/// with p, q whole periods nearest to X/wavelength, Z/wavelength. The
/// recess depth is amplitude + d, so the surface stays inside the body
/// and its depth variance over the face is exactly amplitude^2 / 4.
struct SurfaceModel {
  enum class Type { kFlatRigid, kCrinkled };
  Type type = Type::kFlatRigid;
  double amplitude = 0.0;   // m
  double wavelength = 0.08; // m
};

struct SimObject {
  int id = 0;  // 1-based; 0 is background in id masks
  ObjectKind kind = ObjectKind::kBox;
  RigidTransform pose;       // local -> world, rotation is yaw-only
  Vec3 dimensions = Vec3(0.1, 0.1, 0.1);  // full extents
  SurfaceModel surface;
  double porosity = 0.0;     // per-check seal failure probability
  std::string name;

  /// Height-field recess depth at face coordinates (x', z') in
  /// [0, dx] x [0, dz]; zero for flat surfaces.
  double crinkle_depth(double face_x, double face_z) const;

  Aabb world_aabb() const;
};

struct ShelfSpec {
  double width = 0.8;   // m, x extent centered on 0
  double depth = 0.45;  // m, back wall at y = depth
  double height = 0.5;  // m, spawn bound only
};

/// Declarative scene description; objects without a position are placed by
/// rejection sampling, objects without a name draw one from the catalog.
struct ObjectSpec {
  ObjectKind kind = ObjectKind::kBox;
  Vec3 dimensions = Vec3(0.1, 0.05, 0.15);
  std::optional<SurfaceModel> surface;  // defaulted per kind when absent
  std::optional<double> porosity;       // defaulted per kind when absent
  std::string name;                     // empty = draw from catalog
  std::optional<Vec3> position;         // world, center
  double yaw_deg = 0.0;
};

struct SceneSpec {
  ShelfSpec shelf;
  CameraIntrinsics camera;
  std::vector<ObjectSpec> objects;
  std::vector<std::string> catalog;

  static SceneSpec from_json(const json& j);
  json to_json() const;
};

SceneSpec load_scene_spec(const std::filesystem::path& path);

struct SimScene {
  ShelfSpec shelf;
  CameraIntrinsics camera;
  std::vector<SimObject> objects;
  std::uint64_t rng_seed = 0;

  json resolved_to_json() const;
};

/// Deterministic scene instantiation; throws ConfigError if an object
/// cannot be placed without interpenetration within the attempt budget.
SimScene generate_scene(const SceneSpec& spec, std::uint64_t rng_seed);

/// Per-pixel object ids (0 = shelf/background), written as 16-bit PNG.
struct IdMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

void save_id_mask(const std::filesystem::path& path, const IdMask& mask);
IdMask load_id_mask(const std::filesystem::path& path);

struct RenderResult {
  DepthFrame depth;
  ColorFrame color;
  IdMask ids;
};

/// Ray-cast against the analytic scene from a camera pose (camera frame:
/// +z forward, +y down; pose maps camera to world). Depth is the camera-z
/// distance quantized by the intrinsics' depth_scale.
RenderResult render_depth(const SimScene& scene,
                          const RigidTransform& camera_pose);

/// Binary mask of pixels whose object name occurs in the directive
/// (case-insensitive substring).
Mask mask_for_directive(const IdMask& ids, const SimScene& scene,
                        const std::string& directive);

enum class SuctionFailureMode { kBadAngle, kEdgeLeak, kCrinkleLeak,
                                kPorosityLeak };

std::string to_string(SuctionFailureMode m);

struct PickOutcome {
  bool sealed = false;
  bool held_through_lift = false;
  std::optional<SuctionFailureMode> failure_mode;
};

struct SuctionParams {
  double theta_max_deg = 15.0;      // max angle between -approach and normal
  double leak_gap = 0.0015;         // m, tolerated crinkle deviation
  double contact_tolerance = 0.005; // m, how close the point must be to a face
  int disk_samples = 64;
};

/// Rule-based seal adjudication at a world point: approach angle, edge
/// overhang, crinkle gap, then a porosity draw (and a second draw for the
/// lift). failure_mode reports the first violated condition. Throws
/// std::invalid_argument when the point is on no object surface.
PickOutcome attempt_suction(const SimScene& scene, const Vec3& point_world,
                            const Vec3& approach_dir, double cup_radius,
                            Rng& rng,
                            const SuctionParams& params = SuctionParams{});

/// Distance from a world point to the object's surface (height-field aware
/// on crinkled front faces).
double surface_distance(const SimObject& object, const Vec3& point_world);

/// Simulated Environment: renders the wrist camera from the current tool
/// pose, grounds the directive via the id mask, and adjudicates suction
/// with attempt_suction. Robot frame coincides with the world frame.
class SimEnvironment : public Environment {
 public:
  SimEnvironment(SimScene scene, std::string directive,
                 std::uint64_t rng_seed, RobotPose initial_pose,
                 double cup_radius = 0.015,
                 SuctionParams params = SuctionParams{});

  Observation observe() override;
  void move_to(const RobotPose& pose) override;
  void set_vacuum(bool on) override;
  bool vacuum_sealed() override;

  // Instrumentation for tests and logging.
  bool vacuum_on() const { return vacuum_on_; }
  const RobotPose& pose() const { return pose_; }
  std::uint64_t frames_rendered() const { return frame_counter_; }
  /// Most recent seal adjudication; survives vacuum-off for inspection.
  const std::optional<PickOutcome>& last_outcome() const {
    return last_adjudication_;
  }
  const SimScene& scene() const { return scene_; }

  /// Camera pose for a tool pose: camera at the tool tip looking along the
  /// approach axis, image x right, image y down.
  static RigidTransform camera_pose_for(const RobotPose& pose);

 private:
  SimScene scene_;
  std::string directive_;
  Rng rng_;
  RobotPose pose_;
  double cup_radius_;
  SuctionParams params_;
  std::uint64_t frame_counter_ = 0;
  bool vacuum_on_ = false;
  std::optional<PickOutcome> outcome_;
  std::optional<PickOutcome> last_adjudication_;
  bool moved_since_seal_ = false;
};

}  // namespace suction
