// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "suction/clustering.hpp"
#include "suction/projection.hpp"
#include "suction/prompting.hpp"
#include "suction/rgbd.hpp"
#include "suction/vlm.hpp"

namespace suction {

/// Tool-tip position and the direction the suction cup points.
struct RobotPose {
  Vec3 position = Vec3::Zero();
  Vec3 approach_axis = Vec3::UnitZ();

  json to_json() const;
  static RobotPose from_json(const json& j);
};

/// One observation from the wrist camera plus the robot state it was taken
/// from. frame_id strictly increases; the loop never reuses a stale frame.
struct Observation {
  ColorFrame color;
  DepthFrame depth;
  RobotPose pose;
  CameraIntrinsics intrinsics;
  RigidTransform camera_to_robot;
  std::optional<Mask> target_mask;
  std::uint64_t frame_id = 0;
};

/// Hardware abstraction boundary: the simulator implements this; a real
/// arm + camera + pump would sit behind the same four calls.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation observe() = 0;
  virtual void move_to(const RobotPose& pose) = 0;
  virtual void set_vacuum(bool on) = 0;
  virtual bool vacuum_sealed() = 0;
};

struct ExecutorConfig {
  int max_action_iterations = 10;
  double approach_step = 0.05;     // m per iteration
  double contact_distance = 0.01;  // m, triggers the pickup sequence
  double lift_height = 0.10;       // m, retract along -approach
  int refusal_retries = 2;         // re-observations before TargetNotFound

  std::optional<Aabb> workspace;  // camera-frame crop, optional
  ClusteringConfig clustering;
  DeciderConfig decider;
  MarkerStyle marker_style;
  std::optional<std::string> role_override;
  std::optional<std::string> premise_override;

  void validate() const;

  static ExecutorConfig from_json(const json& j);
  json to_json() const;
};

enum class PickStatus { kSuccess, kTargetNotFound, kIterationLimit,
                        kSuctionFailed };

std::string to_string(PickStatus s);

/// One observe-decide-act cycle as logged to the episode JSON-lines file.
struct IterationRecord {
  int iteration = 0;
  std::uint64_t frame_id = 0;
  RobotPose pose;
  std::string candidates_digest;
  int candidate_count = 0;
  DecisionOrRefusal decision = Refusal{};
  std::string action;

  json to_json() const;
};

struct PickResult {
  PickStatus outcome = PickStatus::kIterationLimit;
  int iterations_used = 0;
  std::vector<RobotPose> trajectory;
  std::optional<SuctionCandidate> selected_candidate;
  std::vector<DecisionOrRefusal> decision_log;
  std::vector<IterationRecord> iteration_records;

  json summary_to_json() const;
  void write_episode_jsonl(const std::filesystem::path& path) const;
};

/// Advance min(step, remaining) along the line to the target while turning
/// the approach axis toward the surface anti-normal; the axis is fully
/// aligned once the remaining distance drops to 2 * step.
RobotPose approach_step(const RobotPose& current, const Vec3& target_point,
                        const Vec3& target_normal, double step);

/// Contact, seal check, lift, seal re-check. Requires the tool within
/// contact_distance of the candidate and the vacuum already on. Leaves the
/// vacuum on only after a fully held lift.
PickStatus pickup_sequence(Environment& env, const SuctionCandidate& candidate,
                           const ExecutorConfig& cfg,
                           const Vec3& approach_axis);

/// The iterative suction loop: observe, generate candidates, decide,
/// step toward the selection, and vacuum-pick once in contact. Refusals
/// reset the robot to its initial pose; the refusal retry budget and the
/// iteration budget bound the loop. Environment faults propagate with the
/// vacuum forced off.
PickResult run_pick_loop(Environment& env, const std::string& directive,
                         const ExecutorConfig& cfg);

/// Hash identifying one observation + directive + candidate labeling;
/// the key under which live decisions are recorded and replayed.
std::string scene_key(const DepthFrame& depth, const ColorFrame& color,
                      const std::string& directive,
                      const std::vector<SuctionCandidate>& candidates);

}  // namespace suction
