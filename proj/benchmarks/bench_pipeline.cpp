// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the perception-to-decision pipeline stages.

#include <benchmark/benchmark.h>

#include "suction/clustering.hpp"
#include "suction/pipeline.hpp"
#include "suction/projection.hpp"
#include "suction/prompting.hpp"
#include "suction/rgbd.hpp"
#include "suction/sim.hpp"
#include "suction/vlm.hpp"

using namespace suction;

namespace {

CameraIntrinsics bench_camera(int w, int h, double f) {
  CameraIntrinsics intr;
  intr.fx = intr.fy = f;
  intr.cx = w / 2.0;
  intr.cy = h / 2.0;
  intr.width = w;
  intr.height = h;
  intr.depth_scale = 0.001;
  return intr;
}

SceneSpec bench_scene(int w, int h, double f) {
  SceneSpec spec;
  spec.camera = bench_camera(w, h, f);
  spec.shelf.depth = 0.45;
  ObjectSpec box;
  box.kind = ObjectKind::kBox;
  box.dimensions = Vec3(0.14, 0.08, 0.2);
  box.name = "green tea box";
  box.position = Vec3(-0.06, 0.25, 0.1);
  spec.objects.push_back(box);
  ObjectSpec bag;
  bag.kind = ObjectKind::kBag;
  bag.dimensions = Vec3(0.12, 0.05, 0.1);
  bag.name = "potato chips";
  bag.position = Vec3(0.12, 0.2, 0.05);
  spec.objects.push_back(bag);
  return spec;
}

RigidTransform bench_view() {
  return SimEnvironment::camera_pose_for(
      RobotPose{Vec3(0, -0.2, 0.1), Vec3(0, 1, 0)});
}

const SimScene& vga_scene() {
  static const SimScene scene = generate_scene(bench_scene(640, 480, 525), 1);
  return scene;
}

const RenderResult& vga_render() {
  static const RenderResult render = render_depth(vga_scene(), bench_view());
  return render;
}

}  // namespace

static void BM_RenderDepthQvga(benchmark::State& state) {
  const SimScene scene = generate_scene(bench_scene(320, 240, 260), 1);
  const RigidTransform view = bench_view();
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_depth(scene, view));
  }
}
BENCHMARK(BM_RenderDepthQvga)->Unit(benchmark::kMillisecond);

static void BM_DeprojectVga(benchmark::State& state) {
  const RenderResult& render = vga_render();
  for (auto _ : state) {
    benchmark::DoNotOptimize(deproject(render.depth, vga_scene().camera));
  }
}
BENCHMARK(BM_DeprojectVga)->Unit(benchmark::kMillisecond);

static void BM_KmeansVgaCloud(benchmark::State& state) {
  const PointCloud cloud = deproject(vga_render().depth, vga_scene().camera);
  ClusteringConfig cfg;
  cfg.k = static_cast<int>(state.range(0));
  cfg.restarts = 2;
  cfg.max_iterations = 25;
  cfg.convergence_eps = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans(cloud, cfg));
  }
  state.counters["points"] = static_cast<double>(cloud.size());
}
BENCHMARK(BM_KmeansVgaCloud)->Arg(8)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_ProposeQvga(benchmark::State& state) {
  const SimScene scene = generate_scene(bench_scene(320, 240, 260), 1);
  const RenderResult render = render_depth(scene, bench_view());
  ClusteringConfig cfg;
  cfg.k = 12;
  cfg.restarts = 2;
  cfg.max_iterations = 25;
  cfg.convergence_eps = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propose_candidates(
        render.depth, scene.camera, cfg, std::nullopt, RigidTransform{}));
  }
}
BENCHMARK(BM_ProposeQvga)->Unit(benchmark::kMillisecond);

static void BM_RenderMarkers(benchmark::State& state) {
  const RenderResult& render = vga_render();
  ClusteringConfig cfg;
  cfg.k = 15;
  cfg.restarts = 1;
  cfg.max_iterations = 20;
  cfg.convergence_eps = 1e-4;
  const Proposal proposal = propose_candidates(
      render.depth, vga_scene().camera, cfg, std::nullopt, RigidTransform{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        render_markers(render.color, proposal.candidates));
  }
  state.counters["markers"] = static_cast<double>(proposal.candidates.size());
}
BENCHMARK(BM_RenderMarkers)->Unit(benchmark::kMillisecond);

static void BM_ScoreCandidate(benchmark::State& state) {
  const SimScene scene = generate_scene(bench_scene(160, 120, 130), 1);
  const RenderResult render = render_depth(scene, bench_view());
  const PointCloud cloud = deproject(render.depth, scene.camera);
  SuctionCandidate c;
  c.label = 1;
  c.point_camera = Vec3(-0.06, -0.09, 0.41);  // on the box front face
  c.normal_camera = Vec3(0, 0, -1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_candidate(c, cloud));
  }
  state.counters["points"] = static_cast<double>(cloud.size());
}
BENCHMARK(BM_ScoreCandidate)->Unit(benchmark::kMicrosecond);

static void BM_AttemptSuction(benchmark::State& state) {
  const SimScene scene = generate_scene(bench_scene(160, 120, 130), 1);
  Rng rng(3);
  const Vec3 on_face(-0.06, 0.21, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        attempt_suction(scene, on_face, Vec3(0, 1, 0), 0.015, rng));
  }
}
BENCHMARK(BM_AttemptSuction)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
