// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "suction/executor.hpp"
#include "suction/prompting.hpp"
#include "suction/sim.hpp"
#include "suction/vlm.hpp"

namespace suction {

/// One scored decision. For selection runs, correct means the head of the
/// ranked labels landed in the acceptable set (or intersected it, when
/// set-intersection scoring is enabled). For picking runs, correct means
/// the episode ended in Success.
struct EvalRecord {
  std::string scene_id;
  std::string category;
  std::string candidates_digest;
  std::vector<int> acceptable_labels;
  DecisionOrRefusal decision = Refusal{};
  bool correct = false;
  bool format_error = false;

  json to_json() const;
  static EvalRecord from_json(const json& j);
};

bool decision_is_correct(const DecisionOrRefusal& decision,
                         const std::vector<int>& acceptable_labels,
                         bool set_intersection = false);

struct CategoryStats {
  int total = 0;
  int correct = 0;
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  int format_errors = 0;
  std::map<std::string, CategoryStats> per_category;

  double accuracy_raw() const;
  /// Format errors removed from the denominator, mirroring how response
  /// format failures are excluded from model accuracy.
  double accuracy_excluding_format_errors() const;

  static EvalReport aggregate(const std::vector<EvalRecord>& records);

  json to_json() const;
  std::string to_text() const;
};

/// Ratio (0.754...) rendered as "75.4%".
std::string format_percent(double ratio);

/// One row of the offline selection dataset manifest (JSON-lines).
struct SelectionSceneSpec {
  std::string scene_id;
  std::string color_path;
  std::string depth_path;
  std::string intrinsics_path;
  std::vector<int> acceptable_labels;
  std::string directive;
  std::string category;
};

std::vector<SelectionSceneSpec> load_selection_manifest(
    const std::filesystem::path& path);

struct SelectionEvalOptions {
  ClusteringConfig clustering;
  std::optional<Aabb> workspace;
  MarkerStyle marker_style;
  RigidTransform camera_to_robot;
  bool set_intersection_scoring = false;
  /// When set, a post-decision visualization PNG is written per scene.
  std::optional<std::filesystem::path> visualization_dir;
};

struct EvalRun {
  EvalReport report;
  std::vector<EvalRecord> records;
};

/// Run the decider over every manifest scene and score head-of-list
/// correctness. Format errors are flagged and excluded only from the
/// excluding-format-errors accuracy; other decider faults count as
/// incorrect. Throws ConfigError on an empty dataset.
EvalRun evaluate_selection(const std::vector<SelectionSceneSpec>& dataset,
                           Decider& decider,
                           const SelectionEvalOptions& options = {});

/// One picking-evaluation manifest row: a scene spec run for `episodes`
/// seeded episodes.
struct PickingSceneSpec {
  std::string scene_id;
  SceneSpec scene;
  std::string directive;
  std::string category;
  int episodes = 1;
};

std::vector<PickingSceneSpec> load_picking_manifest(
    const std::filesystem::path& path);

/// Run seeded pick episodes in the simulator and report success rates per
/// category and overall.
EvalRun evaluate_picking(const std::vector<PickingSceneSpec>& dataset,
                         const ExecutorConfig& cfg, std::uint64_t base_seed,
                         const RobotPose& initial_pose);

/// Post-decision rendering: every candidate yellow, the decision's
/// non-head labels green, the head label red. Refusals leave everything
/// yellow.
AnnotatedImage visualize_decision(const ColorFrame& image,
                                  const std::vector<SuctionCandidate>& candidates,
                                  const DecisionOrRefusal& decision,
                                  const MarkerStyle& style = MarkerStyle{});

/// report.json, report.txt and records.jsonl under dir.
void write_report_files(const std::filesystem::path& dir,
                        const EvalRun& run);

}  // namespace suction
