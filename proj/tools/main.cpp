// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0
//
// suctionprompt CLI: generate labeled suction candidates from RGB-D input,
// run simulated pick episodes, and drive the offline evaluation harness.
//
// Exit codes:
//   propose        0 candidates written, 2 no candidates, 1 error
//   pick           0 success, 3 target not found, 4 iteration limit,
//                  5 suction failed, 1 error
//   eval           0 evaluation completed, 1 error
//   simulate-scene 0 scene written, 1 error

#include "suction/eval.hpp"
#include "suction/executor.hpp"
#include "suction/pipeline.hpp"
#include "suction/sim.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "suction/errors.hpp"

namespace fs = std::filesystem;
using namespace suction;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNoCandidates = 2;

int exit_code_for(PickStatus status) {
  switch (status) {
    case PickStatus::kSuccess:
      return 0;
    case PickStatus::kTargetNotFound:
      return 3;
    case PickStatus::kIterationLimit:
      return 4;
    case PickStatus::kSuctionFailed:
      return 5;
  }
  return kExitError;
}

/// Layered configuration: a JSON config file provides defaults, flags win.
struct GlobalConfig {
  std::string intrinsics_path;
  std::string transform_path;
  std::string prompts_dir;
  std::string out_dir = ".";
  int verbosity = 1;

  ClusteringConfig clustering;
  std::optional<Aabb> workspace;
  MarkerStyle marker_style;
  ExecutorConfig executor;
  RobotPose initial_pose{Vec3(0, -0.3, 0.15), Vec3(0, 1, 0)};

  static GlobalConfig load(const std::string& path) {
    GlobalConfig cfg;
    const json j = load_json_file(path);
    cfg.intrinsics_path = j.value("intrinsics", cfg.intrinsics_path);
    cfg.transform_path = j.value("transform", cfg.transform_path);
    cfg.prompts_dir = j.value("prompts_dir", cfg.prompts_dir);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.verbosity = j.value("verbosity", cfg.verbosity);
    if (j.contains("clustering")) {
      cfg.clustering = ClusteringConfig::from_json(j.at("clustering"));
    }
    if (j.contains("workspace") && !j.at("workspace").is_null()) {
      cfg.workspace = Aabb::from_json(j.at("workspace"));
    }
    if (j.contains("marker_style")) {
      cfg.marker_style = MarkerStyle::from_json(j.at("marker_style"));
    }
    if (j.contains("executor")) {
      cfg.executor = ExecutorConfig::from_json(j.at("executor"));
    }
    if (j.contains("decider")) {
      cfg.executor.decider = DeciderConfig::from_json(j.at("decider"));
    }
    if (j.contains("initial_pose")) {
      cfg.initial_pose = RobotPose::from_json(j.at("initial_pose"));
    }
    for (const char* key : {"intrinsics", "transform", "prompts_dir"}) {
      if (j.contains(key) && !fs::exists(j.at(key).get<std::string>())) {
        throw ConfigError(std::string("config: ") + key + " path '" +
                          j.at(key).get<std::string>() + "' does not exist");
      }
    }
    return cfg;
  }
};

/// Prompt template overrides from a directory holding role.txt/premise.txt.
void load_prompt_overrides(const std::string& dir, ExecutorConfig& executor) {
  if (dir.empty()) return;
  if (!fs::is_directory(dir)) {
    throw ConfigError("prompts dir '" + dir + "' does not exist");
  }
  const fs::path role = fs::path(dir) / "role.txt";
  const fs::path premise = fs::path(dir) / "premise.txt";
  if (fs::exists(role)) executor.role_override = read_text_file(role);
  if (fs::exists(premise)) executor.premise_override = read_text_file(premise);
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string backend;
  std::string endpoint;
  std::string model;
  std::string replay_log;
  std::string record_log;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

GlobalConfig resolve_config(const CommonFlags& flags) {
  GlobalConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = GlobalConfig::load(flags.config_path);
  }
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.backend.empty()) {
    cfg.executor.decider.backend = decider_backend_from_string(flags.backend);
  }
  if (!flags.endpoint.empty()) cfg.executor.decider.endpoint = flags.endpoint;
  if (!flags.model.empty()) cfg.executor.decider.model = flags.model;
  if (!flags.replay_log.empty()) {
    cfg.executor.decider.replay_path = flags.replay_log;
  }
  if (!flags.record_log.empty()) {
    cfg.executor.decider.record_path = flags.record_log;
  }
  if (flags.seed_set) {
    cfg.clustering.rng_seed = flags.seed;
    cfg.executor.clustering.rng_seed = flags.seed;
  }
  load_prompt_overrides(cfg.prompts_dir, cfg.executor);
  return cfg;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "JSON config file (flags override it)");
  cmd->add_option("--out-dir", flags.out_dir, "output directory");
  cmd->add_option("--backend", flags.backend,
                  "decider backend: oracle | live | replay");
  cmd->add_option("--endpoint", flags.endpoint,
                  "chat-completions endpoint URL (live backend)");
  cmd->add_option("--model", flags.model, "model name (live backend)");
  cmd->add_option("--replay-log", flags.replay_log,
                  "replay log path (replay backend)");
  cmd->add_option("--record-log", flags.record_log,
                  "record live decisions to this JSON-lines file");
  cmd->add_option("--seed", flags.seed, "RNG seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
}

fs::path ensure_out_dir(const GlobalConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_propose(const CommonFlags& flags, const std::string& color_path,
                const std::string& depth_path,
                const std::string& intrinsics_flag,
                const std::string& transform_flag, int k_flag) {
  GlobalConfig cfg = resolve_config(flags);
  const std::string intrinsics_path =
      intrinsics_flag.empty() ? cfg.intrinsics_path : intrinsics_flag;
  if (intrinsics_path.empty()) {
    throw ConfigError("propose: --intrinsics is required");
  }
  const CameraIntrinsics intr = load_intrinsics(intrinsics_path);

  const std::string transform_path =
      transform_flag.empty() ? cfg.transform_path : transform_flag;
  const RigidTransform camera_to_robot =
      transform_path.empty() ? RigidTransform{}
                             : load_transform(transform_path);

  const DepthFrame depth = load_depth(depth_path, intr);
  const ColorFrame color = load_color(color_path);
  if (color.width != intr.width || color.height != intr.height) {
    throw ConfigError("propose: color frame does not match intrinsics size");
  }

  ClusteringConfig clustering = cfg.clustering;
  if (k_flag > 0) clustering.k = k_flag;

  const Proposal proposal = propose_candidates(depth, intr, clustering,
                                               cfg.workspace, camera_to_robot);
  const AnnotatedImage annotated =
      render_markers(color, proposal.candidates, cfg.marker_style);

  const fs::path out = ensure_out_dir(cfg);
  save_color(out / "annotated.png", annotated.pixels);
  save_json_file(out / "candidates.json",
                 candidates_to_json(proposal.candidates));

  if (cfg.verbosity > 0) {
    std::cout << proposal.candidates.size() << " candidate(s) from "
              << proposal.cloud.size() << " points -> "
              << (out / "annotated.png").string() << ", "
              << (out / "candidates.json").string() << "\n";
  }
  if (proposal.candidates.empty()) {
    std::cerr << "no candidates\n";
    return kExitNoCandidates;
  }
  return 0;
}

int cmd_pick(const CommonFlags& flags, const std::string& scene_path,
             const std::string& directive) {
  GlobalConfig cfg = resolve_config(flags);
  const SceneSpec spec = load_scene_spec(scene_path);
  const std::uint64_t seed = flags.seed_set ? flags.seed : 0;

  const SimScene scene = generate_scene(spec, seed);
  SimEnvironment env(scene, directive, seed ^ 0x9e3779b97f4a7c15ULL,
                     cfg.initial_pose,
                     cfg.executor.decider.score.cup_radius);
  const PickResult result = run_pick_loop(env, directive, cfg.executor);

  const fs::path out = ensure_out_dir(cfg);
  result.write_episode_jsonl(out / "episode.jsonl");
  json summary = result.summary_to_json();
  summary["directive"] = directive;
  summary["seed"] = seed;
  save_json_file(out / "summary.json", summary);

  if (cfg.verbosity > 0) {
    std::cout << to_string(result.outcome) << " after "
              << result.iterations_used << " iteration(s) -> "
              << (out / "episode.jsonl").string() << "\n";
  }
  return exit_code_for(result.outcome);
}

int cmd_eval(const CommonFlags& flags, const std::string& mode,
             const std::string& manifest_path) {
  GlobalConfig cfg = resolve_config(flags);
  const fs::path out = ensure_out_dir(cfg);

  EvalRun run;
  if (mode == "selection") {
    const auto dataset = load_selection_manifest(manifest_path);
    SelectionEvalOptions options;
    options.clustering = cfg.clustering;
    options.workspace = cfg.workspace;
    options.marker_style = cfg.marker_style;
    if (!cfg.transform_path.empty()) {
      options.camera_to_robot = load_transform(cfg.transform_path);
    }
    Decider decider(cfg.executor.decider);
    run = evaluate_selection(dataset, decider, options);
  } else if (mode == "picking") {
    const auto dataset = load_picking_manifest(manifest_path);
    const std::uint64_t seed = flags.seed_set ? flags.seed : 0;
    run = evaluate_picking(dataset, cfg.executor, seed, cfg.initial_pose);
  } else if (mode == "ledger") {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open ledger " + manifest_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      run.records.push_back(EvalRecord::from_json(json::parse(line)));
    }
    if (run.records.empty()) {
      throw ConfigError("eval: nothing to evaluate in " + manifest_path);
    }
    run.report = EvalReport::aggregate(run.records);
  } else {
    throw ConfigError("eval: unknown mode '" + mode +
                      "' (expected selection | picking | ledger)");
  }

  write_report_files(out, run);
  if (cfg.verbosity > 0) {
    std::cout << run.report.to_text();
    std::cout << "report -> " << (out / "report.json").string() << "\n";
  }
  return 0;
}

int cmd_simulate_scene(const CommonFlags& flags,
                       const std::string& scene_path) {
  GlobalConfig cfg = resolve_config(flags);
  const SceneSpec spec = load_scene_spec(scene_path);
  const std::uint64_t seed = flags.seed_set ? flags.seed : 0;
  const SimScene scene = generate_scene(spec, seed);

  const RigidTransform camera_pose =
      SimEnvironment::camera_pose_for(cfg.initial_pose);
  const RenderResult render = render_depth(scene, camera_pose);

  const fs::path out = ensure_out_dir(cfg);
  save_color(out / "color.png", render.color);
  save_depth(out / "depth.png", render.depth);
  save_id_mask(out / "ids.png", render.ids);
  save_json_file(out / "scene.json", scene.resolved_to_json());
  save_json_file(out / "intrinsics.json", scene.camera.to_json());

  if (cfg.verbosity > 0) {
    std::cout << scene.objects.size() << " object(s) rendered -> "
              << (out / "color.png").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "suctionprompt: 3D-grounded suction-point proposal, VLM-prompted "
      "selection, and a simulated pick loop"};
  app.require_subcommand(1);

  CommonFlags flags;

  // propose
  std::string color_path, depth_path, intrinsics_path, transform_path;
  int k_flag = 0;
  CLI::App* propose =
      app.add_subcommand("propose", "annotate suction candidates on an image");
  propose->add_option("--color", color_path, "8-bit RGB PNG")->required();
  propose->add_option("--depth", depth_path, "16-bit grayscale PNG")
      ->required();
  propose->add_option("--intrinsics", intrinsics_path, "intrinsics JSON");
  propose->add_option("--transform", transform_path,
                      "camera-to-robot transform JSON");
  propose->add_option("--k", k_flag, "cluster count");
  add_common_flags(propose, flags);

  // pick
  std::string scene_path, directive;
  CLI::App* pick =
      app.add_subcommand("pick", "run one simulated pick episode");
  pick->add_option("--scene", scene_path, "scene spec JSON")->required();
  pick->add_option("--directive", directive, "pick request text")->required();
  add_common_flags(pick, flags);

  // eval
  std::string eval_mode = "selection";
  std::string manifest_path;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "offline evaluation harness");
  eval_cmd->add_option("--mode", eval_mode,
                       "selection | picking | ledger (default selection)");
  eval_cmd->add_option("--manifest", manifest_path, "dataset manifest")
      ->required();
  add_common_flags(eval_cmd, flags);

  // simulate-scene
  std::string sim_scene_path;
  CLI::App* simulate = app.add_subcommand(
      "simulate-scene", "generate and render a synthetic shelf scene");
  simulate->add_option("--scene", sim_scene_path, "scene spec JSON")
      ->required();
  add_common_flags(simulate, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (propose->parsed()) {
      return cmd_propose(flags, color_path, depth_path, intrinsics_path,
                         transform_path, k_flag);
    }
    if (pick->parsed()) {
      return cmd_pick(flags, scene_path, directive);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(flags, eval_mode, manifest_path);
    }
    if (simulate->parsed()) {
      return cmd_simulate_scene(flags, sim_scene_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
