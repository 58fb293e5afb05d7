// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "suction/digest.hpp"
#include "suction/errors.hpp"
#include "suction/pipeline.hpp"

namespace suction {

json EvalRecord::to_json() const {
  return json{{"scene_id", scene_id},
              {"category", category},
              {"candidates_digest", candidates_digest},
              {"acceptable_labels", acceptable_labels},
              {"decision", decision_to_json(decision)},
              {"correct", correct},
              {"format_error", format_error}};
}

EvalRecord EvalRecord::from_json(const json& j) {
  EvalRecord r;
  r.scene_id = j.at("scene_id").get<std::string>();
  r.category = j.value("category", std::string{});
  r.candidates_digest = j.value("candidates_digest", std::string{});
  r.acceptable_labels =
      j.value("acceptable_labels", std::vector<int>{});
  r.decision = decision_from_json(j.at("decision"));
  r.correct = j.at("correct").get<bool>();
  r.format_error = j.value("format_error", false);
  return r;
}

bool decision_is_correct(const DecisionOrRefusal& decision,
                         const std::vector<int>& acceptable_labels,
                         bool set_intersection) {
  const auto* dec = std::get_if<VlmDecision>(&decision);
  if (!dec || dec->selected_labels.empty()) return false;
  if (set_intersection) {
    return std::any_of(dec->selected_labels.begin(),
                       dec->selected_labels.end(), [&](int label) {
                         return std::find(acceptable_labels.begin(),
                                          acceptable_labels.end(),
                                          label) != acceptable_labels.end();
                       });
  }
  const int head = dec->selected_labels.front();
  return std::find(acceptable_labels.begin(), acceptable_labels.end(),
                   head) != acceptable_labels.end();
}

double EvalReport::accuracy_raw() const {
  return total > 0 ? static_cast<double>(correct) / total : 0.0;
}

double EvalReport::accuracy_excluding_format_errors() const {
  const int denom = total - format_errors;
  return denom > 0 ? static_cast<double>(correct) / denom : 0.0;
}

EvalReport EvalReport::aggregate(const std::vector<EvalRecord>& records) {
  EvalReport report;
  for (const EvalRecord& r : records) {
    ++report.total;
    if (r.correct) ++report.correct;
    if (r.format_error) ++report.format_errors;
    CategoryStats& cat =
        report.per_category[r.category.empty() ? "uncategorized"
                                                : r.category];
    ++cat.total;
    if (r.correct) ++cat.correct;
  }
  return report;
}

std::string format_percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", ratio * 100.0);
  return buf;
}

json EvalReport::to_json() const {
  json cats = json::object();
  for (const auto& [name, stats] : per_category) {
    cats[name] = json{
        {"total", stats.total},
        {"correct", stats.correct},
        {"rate", format_percent(stats.total > 0
                                    ? static_cast<double>(stats.correct) /
                                          stats.total
                                    : 0.0)}};
  }
  return json{{"total", total},
              {"correct", correct},
              {"format_errors", format_errors},
              {"accuracy", format_percent(accuracy_raw())},
              {"accuracy_ratio", accuracy_raw()},
              {"accuracy_excluding_format_errors",
               format_percent(accuracy_excluding_format_errors())},
              {"per_category", cats}};
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "total: " << total << "\n";
  out << "correct: " << correct << "\n";
  out << "accuracy: " << correct << "/" << total << " = "
      << format_percent(accuracy_raw()) << "\n";
  out << "format errors: " << format_errors << "\n";
  out << "accuracy (format errors excluded): "
      << format_percent(accuracy_excluding_format_errors()) << "\n";
  if (!per_category.empty()) {
    out << "by category:\n";
    for (const auto& [name, stats] : per_category) {
      const double rate =
          stats.total > 0 ? static_cast<double>(stats.correct) / stats.total
                          : 0.0;
      out << "  " << name << ": " << stats.correct << "/" << stats.total
          << " = " << format_percent(rate) << "\n";
    }
  }
  return out.str();
}

std::vector<SelectionSceneSpec> load_selection_manifest(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest " + path.string());
  }
  std::vector<SelectionSceneSpec> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("manifest " + path.string() + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    SelectionSceneSpec row;
    row.scene_id = j.at("scene_id").get<std::string>();
    row.color_path = j.at("color_path").get<std::string>();
    row.depth_path = j.at("depth_path").get<std::string>();
    row.intrinsics_path = j.at("intrinsics_path").get<std::string>();
    row.acceptable_labels = j.at("acceptable_labels").get<std::vector<int>>();
    row.directive = j.at("directive").get<std::string>();
    row.category = j.value("category", std::string{});
    rows.push_back(std::move(row));
  }
  return rows;
}

EvalRun evaluate_selection(const std::vector<SelectionSceneSpec>& dataset,
                           Decider& decider,
                           const SelectionEvalOptions& options) {
  if (dataset.empty()) {
    throw ConfigError("evaluate_selection: nothing to evaluate");
  }
  EvalRun run;
  for (const SelectionSceneSpec& row : dataset) {
    const CameraIntrinsics intr = load_intrinsics(row.intrinsics_path);
    const DepthFrame depth = load_depth(row.depth_path, intr);
    const ColorFrame color = load_color(row.color_path);

    Proposal proposal =
        propose_candidates(depth, intr, options.clustering, options.workspace,
                           options.camera_to_robot);
    const PromptBundle prompt = assemble_prompt(row.directive);
    const AnnotatedImage annotated =
        render_markers(color, proposal.candidates, options.marker_style);
    const std::string key =
        scene_key(depth, color, row.directive, proposal.candidates);

    EvalRecord record;
    record.scene_id = row.scene_id;
    record.category = row.category;
    record.candidates_digest = candidates_digest(proposal.candidates);
    record.acceptable_labels = row.acceptable_labels;

    std::optional<Mask> no_mask;
    try {
      record.decision = decider.decide(
          DecisionContext{annotated, prompt, proposal.candidates,
                          proposal.cloud, no_mask, key});
      record.correct =
          decision_is_correct(record.decision, row.acceptable_labels,
                              options.set_intersection_scoring);
    } catch (const SchemaViolationError& e) {
      record.decision = Refusal{std::string("format error: ") + e.what()};
      record.format_error = true;
    } catch (const HallucinatedLabelError& e) {
      record.decision = Refusal{std::string("decider error: ") + e.what()};
    }

    if (options.visualization_dir) {
      const AnnotatedImage viz = visualize_decision(
          color, proposal.candidates, record.decision, options.marker_style);
      save_color(*options.visualization_dir / (row.scene_id + "_decision.png"),
                 viz.pixels);
    }
    run.records.push_back(std::move(record));
  }
  run.report = EvalReport::aggregate(run.records);
  return run;
}

std::vector<PickingSceneSpec> load_picking_manifest(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest " + path.string());
  }
  std::vector<PickingSceneSpec> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("manifest " + path.string() + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    PickingSceneSpec row;
    row.scene_id = j.at("scene_id").get<std::string>();
    if (j.contains("scene_spec_path")) {
      std::filesystem::path spec_path =
          j.at("scene_spec_path").get<std::string>();
      if (spec_path.is_relative()) {
        spec_path = path.parent_path() / spec_path;
      }
      row.scene = load_scene_spec(spec_path);
    } else {
      row.scene = SceneSpec::from_json(j.at("scene"));
    }
    row.directive = j.at("directive").get<std::string>();
    row.category = j.value("category", std::string{});
    row.episodes = j.value("episodes", 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

EvalRun evaluate_picking(const std::vector<PickingSceneSpec>& dataset,
                         const ExecutorConfig& cfg, std::uint64_t base_seed,
                         const RobotPose& initial_pose) {
  if (dataset.empty()) {
    throw ConfigError("evaluate_picking: nothing to evaluate");
  }
  EvalRun run;
  for (std::size_t row_idx = 0; row_idx < dataset.size(); ++row_idx) {
    const PickingSceneSpec& row = dataset[row_idx];
    for (int episode = 0; episode < row.episodes; ++episode) {
      Fnv1a seeder;
      seeder.update_u64(base_seed).update(row.scene_id).update_i32(episode);
      const std::uint64_t seed = seeder.value();

      const SimScene scene = generate_scene(row.scene, seed);
      SimEnvironment env(scene, row.directive, seed ^ 0x9e3779b97f4a7c15ULL,
                         initial_pose, cfg.decider.score.cup_radius);
      const PickResult result = run_pick_loop(env, row.directive, cfg);

      EvalRecord record;
      record.scene_id =
          row.scene_id + "#" + std::to_string(episode);
      record.category = row.category;
      record.correct = result.outcome == PickStatus::kSuccess;
      if (!result.decision_log.empty()) {
        record.decision = result.decision_log.back();
      }
      if (result.selected_candidate) {
        record.acceptable_labels = {result.selected_candidate->label};
      }
      run.records.push_back(std::move(record));
    }
  }
  run.report = EvalReport::aggregate(run.records);
  return run;
}

AnnotatedImage visualize_decision(
    const ColorFrame& image, const std::vector<SuctionCandidate>& candidates,
    const DecisionOrRefusal& decision, const MarkerStyle& style) {
  const Rgb yellow{250, 210, 40};
  const Rgb green{60, 185, 75};
  const Rgb red{225, 45, 45};

  std::vector<Rgb> colors(candidates.size(), yellow);
  if (const auto* dec = std::get_if<VlmDecision>(&decision)) {
    for (std::size_t rank = 0; rank < dec->selected_labels.size(); ++rank) {
      const int label = dec->selected_labels[rank];
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].label == label) {
          colors[i] = rank == 0 ? red : green;
        }
      }
    }
  }
  return render_markers_colored(image, candidates, style, colors);
}

void write_report_files(const std::filesystem::path& dir, const EvalRun& run) {
  std::filesystem::create_directories(dir);
  save_json_file(dir / "report.json", run.report.to_json());
  write_text_file(dir / "report.txt", run.report.to_text());
  std::ofstream records(dir / "records.jsonl");
  if (!records) {
    throw IoError("cannot write records under " + dir.string());
  }
  for (const EvalRecord& r : run.records) {
    records << r.to_json().dump() << "\n";
  }
}

}  // namespace suction
