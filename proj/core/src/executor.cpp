// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/executor.hpp"

#include <algorithm>
#include <fstream>

#include <Eigen/Geometry>

#include "suction/digest.hpp"
#include "suction/errors.hpp"
#include "suction/pipeline.hpp"

namespace suction {

namespace {

json vec3_to_json(const Vec3& v) { return json{v.x(), v.y(), v.z()}; }

Vec3 vec3_from_json(const json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>());
}

const SuctionCandidate* find_by_label(
    const std::vector<SuctionCandidate>& candidates, int label) {
  for (const SuctionCandidate& c : candidates) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

}  // namespace

json RobotPose::to_json() const {
  return json{{"position", vec3_to_json(position)},
              {"approach_axis", vec3_to_json(approach_axis)}};
}

RobotPose RobotPose::from_json(const json& j) {
  RobotPose p;
  p.position = vec3_from_json(j.at("position"));
  p.approach_axis = vec3_from_json(j.at("approach_axis")).normalized();
  return p;
}

void ExecutorConfig::validate() const {
  if (max_action_iterations < 1) {
    throw ConfigError("executor: max_action_iterations must be >= 1");
  }
  if (approach_step <= 0.0) {
    throw ConfigError("executor: approach_step must be > 0");
  }
  if (contact_distance <= 0.0 ||
      contact_distance >= approach_step * max_action_iterations) {
    throw ConfigError(
        "executor: need 0 < contact_distance < approach_step * "
        "max_action_iterations");
  }
  if (lift_height < 0.0) {
    throw ConfigError("executor: lift_height must be >= 0");
  }
  if (refusal_retries < 0) {
    throw ConfigError("executor: refusal_retries must be >= 0");
  }
  if (workspace) workspace->validate();
  clustering.validate();
  decider.validate();
  marker_style.validate();
}

ExecutorConfig ExecutorConfig::from_json(const json& j) {
  ExecutorConfig cfg;
  cfg.max_action_iterations =
      j.value("max_action_iterations", cfg.max_action_iterations);
  cfg.approach_step = j.value("approach_step", cfg.approach_step);
  cfg.contact_distance = j.value("contact_distance", cfg.contact_distance);
  cfg.lift_height = j.value("lift_height", cfg.lift_height);
  cfg.refusal_retries = j.value("refusal_retries", cfg.refusal_retries);
  if (j.contains("workspace") && !j.at("workspace").is_null()) {
    cfg.workspace = Aabb::from_json(j.at("workspace"));
  }
  if (j.contains("clustering")) {
    cfg.clustering = ClusteringConfig::from_json(j.at("clustering"));
  }
  if (j.contains("decider")) {
    cfg.decider = DeciderConfig::from_json(j.at("decider"));
  }
  if (j.contains("marker_style")) {
    cfg.marker_style = MarkerStyle::from_json(j.at("marker_style"));
  }
  if (j.contains("role_override")) {
    cfg.role_override = j.at("role_override").get<std::string>();
  }
  if (j.contains("premise_override")) {
    cfg.premise_override = j.at("premise_override").get<std::string>();
  }
  cfg.validate();
  return cfg;
}

json ExecutorConfig::to_json() const {
  json j{{"max_action_iterations", max_action_iterations},
         {"approach_step", approach_step},
         {"contact_distance", contact_distance},
         {"lift_height", lift_height},
         {"refusal_retries", refusal_retries},
         {"clustering", clustering.to_json()},
         {"decider", decider.to_json()},
         {"marker_style", marker_style.to_json()}};
  if (workspace) j["workspace"] = workspace->to_json();
  if (role_override) j["role_override"] = *role_override;
  if (premise_override) j["premise_override"] = *premise_override;
  return j;
}

std::string to_string(PickStatus s) {
  switch (s) {
    case PickStatus::kSuccess:
      return "success";
    case PickStatus::kTargetNotFound:
      return "target_not_found";
    case PickStatus::kIterationLimit:
      return "iteration_limit";
    case PickStatus::kSuctionFailed:
      return "suction_failed";
  }
  return "unknown";
}

json IterationRecord::to_json() const {
  return json{{"type", "iteration"},
              {"iteration", iteration},
              {"frame_id", frame_id},
              {"pose", pose.to_json()},
              {"candidates_digest", candidates_digest},
              {"candidate_count", candidate_count},
              {"decision", decision_to_json(decision)},
              {"action", action}};
}

json PickResult::summary_to_json() const {
  json j{{"type", "summary"},
         {"outcome", to_string(outcome)},
         {"iterations_used", iterations_used}};
  if (selected_candidate) j["selected_candidate"] = selected_candidate->to_json();
  return j;
}

void PickResult::write_episode_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write episode log " + path.string());
  }
  for (const IterationRecord& rec : iteration_records) {
    out << rec.to_json().dump() << "\n";
  }
  out << summary_to_json().dump() << "\n";
}

RobotPose approach_step(const RobotPose& current, const Vec3& target_point,
                        const Vec3& target_normal, double step) {
  if (step <= 0.0) {
    throw std::invalid_argument("approach_step: step must be > 0");
  }
  const Vec3 to_target = target_point - current.position;
  const double dist = to_target.norm();
  if (dist < 1e-12) {
    return current;  // already at the target
  }

  RobotPose next;
  const double advance = std::min(step, dist);
  next.position = current.position + to_target * (advance / dist);

  const Vec3 desired = -target_normal.normalized();
  const double remaining = dist - advance;
  if (remaining <= 2.0 * step) {
    next.approach_axis = desired;
  } else {
    const double f = std::clamp(step / (dist - 2.0 * step), 0.0, 1.0);
    const Eigen::Quaterniond full = Eigen::Quaterniond::FromTwoVectors(
        current.approach_axis, desired);
    const Eigen::Quaterniond partial =
        Eigen::Quaterniond::Identity().slerp(f, full);
    next.approach_axis = (partial * current.approach_axis).normalized();
  }
  return next;
}

PickStatus pickup_sequence(Environment& env, const SuctionCandidate& candidate,
                           const ExecutorConfig& cfg,
                           const Vec3& approach_axis) {
  const Vec3 axis = approach_axis.normalized();

  // Advance to contact.
  env.move_to(RobotPose{candidate.point_robot, axis});
  if (!env.vacuum_sealed()) {
    env.set_vacuum(false);
    return PickStatus::kSuctionFailed;
  }

  // Retract along -approach and confirm the object came along.
  env.move_to(RobotPose{candidate.point_robot - cfg.lift_height * axis, axis});
  if (!env.vacuum_sealed()) {
    env.set_vacuum(false);
    return PickStatus::kSuctionFailed;
  }
  return PickStatus::kSuccess;
}

std::string scene_key(const DepthFrame& depth, const ColorFrame& color,
                      const std::string& directive,
                      const std::vector<SuctionCandidate>& candidates) {
  Fnv1a hash;
  hash.update_i32(depth.width).update_i32(depth.height);
  hash.update(depth.data.data(), depth.data.size() * sizeof(std::uint16_t));
  hash.update(color.data.data(), color.data.size());
  hash.update(directive);
  for (const SuctionCandidate& c : candidates) {
    hash.update_i32(c.label);
    hash.update_f64(c.pixel.u).update_f64(c.pixel.v);
  }
  return hash.hex();
}

PickResult run_pick_loop(Environment& env, const std::string& directive,
                         const ExecutorConfig& cfg) {
  cfg.validate();
  Decider decider(cfg.decider);
  const PromptBundle prompt =
      assemble_prompt(directive, cfg.role_override, cfg.premise_override);

  PickResult result;
  std::optional<RobotPose> initial_pose;
  int refusals = 0;

  try {
    for (int count = 0; count < cfg.max_action_iterations; ++count) {
      Observation obs = env.observe();
      if (!initial_pose) initial_pose = obs.pose;
      result.iterations_used = count + 1;
      result.trajectory.push_back(obs.pose);

      Proposal proposal =
          propose_candidates(obs.depth, obs.intrinsics, cfg.clustering,
                             cfg.workspace, obs.camera_to_robot);
      std::vector<SuctionCandidate>& candidates = proposal.candidates;

      const AnnotatedImage annotated =
          render_markers(obs.color, candidates, cfg.marker_style);
      const std::string key =
          scene_key(obs.depth, obs.color, directive, candidates);

      DecisionOrRefusal decision = Refusal{"no candidates"};
      if (!candidates.empty()) {
        decision = decider.decide(DecisionContext{
            annotated, prompt, candidates, proposal.cloud, obs.target_mask,
            key});
      }
      result.decision_log.push_back(decision);

      IterationRecord rec;
      rec.iteration = count + 1;
      rec.frame_id = obs.frame_id;
      rec.pose = obs.pose;
      rec.candidates_digest = candidates_digest(candidates);
      rec.candidate_count = static_cast<int>(candidates.size());
      rec.decision = decision;

      if (is_refusal(decision)) {
        ++refusals;
        env.move_to(*initial_pose);
        rec.action = "reset";
        result.iteration_records.push_back(std::move(rec));
        if (refusals > cfg.refusal_retries) {
          result.outcome = PickStatus::kTargetNotFound;
          return result;
        }
        continue;
      }

      const auto& dec = std::get<VlmDecision>(decision);
      const SuctionCandidate* selected =
          find_by_label(candidates, dec.selected_labels.front());
      if (!selected) {
        throw HallucinatedLabelError(
            "decision references a label outside the candidate set");
      }
      result.selected_candidate = *selected;

      RobotPose pose = obs.pose;
      double dist = (selected->point_robot - pose.position).norm();
      if (dist > cfg.contact_distance) {
        pose = approach_step(pose, selected->point_robot,
                             selected->normal_robot, cfg.approach_step);
        env.move_to(pose);
        dist = (selected->point_robot - pose.position).norm();
        rec.action = "approach";
      }

      if (dist <= cfg.contact_distance) {
        env.set_vacuum(true);
        const PickStatus status =
            pickup_sequence(env, *selected, cfg, pose.approach_axis);
        rec.action = rec.action.empty() ? "pickup" : rec.action + "+pickup";
        result.iteration_records.push_back(std::move(rec));
        result.outcome = status;
        return result;
      }

      result.iteration_records.push_back(std::move(rec));
    }
  } catch (...) {
    try {
      env.set_vacuum(false);
    } catch (...) {
      // keep the original fault
    }
    throw;
  }

  result.outcome = PickStatus::kIterationLimit;
  return result;
}

}  // namespace suction
