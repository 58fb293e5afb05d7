// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include <doctest.h>

#include "suction/errors.hpp"
#include "suction/projection.hpp"
#include "support/synthetic.hpp"

using namespace suction;

namespace {

CameraIntrinsics vga_intrinsics() {
  CameraIntrinsics intr;
  intr.fx = intr.fy = 500;
  intr.cx = 320;
  intr.cy = 240;
  intr.width = 640;
  intr.height = 480;
  intr.depth_scale = 0.001;
  return intr;
}

Cluster plane_cluster(int id, const Vec3& centroid, const Vec3& normal) {
  Cluster c;
  c.id = id;
  c.member_indices = {0, 1, 2};
  c.centroid = centroid;
  c.normal = normal.normalized();
  return c;
}

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("project_to_pixel basics") {
  const CameraIntrinsics intr = vga_intrinsics();

  SUBCASE("optical axis lands on the principal point") {
    const PixelPoint px = project_to_pixel(Vec3(0, 0, 1.5), intr);
    CHECK(px.u == doctest::Approx(320.0));
    CHECK(px.v == doctest::Approx(240.0));
  }
  SUBCASE("hand-computed off-axis point") {
    const PixelPoint px = project_to_pixel(Vec3(0.4, 0, 2.0), intr);
    CHECK(px.u == doctest::Approx(420.0).epsilon(1e-12));
    CHECK(px.v == doctest::Approx(240.0).epsilon(1e-12));
  }
  SUBCASE("scaling the point along its ray leaves the pixel unchanged") {
    const Vec3 p(0.13, -0.21, 1.7);
    const PixelPoint a = project_to_pixel(p, intr);
    const PixelPoint b = project_to_pixel(2.0 * p, intr);
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-12));
    CHECK(a.v == doctest::Approx(b.v).epsilon(1e-12));
  }
  SUBCASE("non-positive depth is rejected") {
    CHECK_THROWS_AS(project_to_pixel(Vec3(0, 0, 0), intr),
                    std::invalid_argument);
    CHECK_THROWS_AS(project_to_pixel(Vec3(0.1, 0.1, -1), intr),
                    std::invalid_argument);
  }
}

TEST_CASE("to_robot_frame") {
  SUBCASE("identity") {
    const RigidTransform xf;
    CHECK(to_robot_frame(Vec3(0.1, 0.2, 0.3), xf) == Vec3(0.1, 0.2, 0.3));
  }
  SUBCASE("pure translation") {
    RigidTransform xf;
    xf.translation = Vec3(0, 0, 0.5);
    CHECK(to_robot_frame(Vec3(0, 0, 1), xf) == Vec3(0, 0, 1.5));
  }
  SUBCASE("90 degree rotation about z") {
    RigidTransform xf;
    xf.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    const Vec3 out = to_robot_frame(Vec3(1, 0, 0), xf);
    CHECK((out - Vec3(0, 1, 0)).norm() < 1e-12);
    // normals rotate without translation
    CHECK((xf.apply_vector(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-12);
  }
}

TEST_CASE("RigidTransform validation and json") {
  RigidTransform xf;
  xf.rotation << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  xf.translation = Vec3(0.1, -0.2, 0.3);
  CHECK_NOTHROW(xf.validate());

  const RigidTransform back = RigidTransform::from_json(xf.to_json());
  CHECK((back.rotation - xf.rotation).norm() < 1e-12);
  CHECK((back.translation - xf.translation).norm() < 1e-12);

  SUBCASE("non-orthonormal rotation rejected") {
    RigidTransform bad = xf;
    bad.rotation(0, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
  SUBCASE("reflection rejected") {
    RigidTransform bad;
    bad.rotation = Eigen::Matrix3d::Identity();
    bad.rotation(2, 2) = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("rigid transforms preserve distances and angles") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const RigidTransform xf = suction::testing::random_transform(rng);
    CHECK(xf.is_valid(1e-9));

    const Vec3 a(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 b(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(std::abs((xf.apply_point(a) - xf.apply_point(b)).norm() -
                   (a - b).norm()) < 1e-9);

    const Vec3 n1 = suction::testing::random_rotation(rng).col(0);
    const Vec3 n2 = suction::testing::random_rotation(rng).col(1);
    CHECK(std::abs(xf.apply_vector(n1).dot(xf.apply_vector(n2)) -
                   n1.dot(n2)) < 1e-9);

    const RigidTransform round = xf.inverse().compose(xf);
    CHECK((round.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK(round.translation.norm() < 1e-9);
  }
}

TEST_CASE("build_candidates: in-view clusters become labels 1..n in raster order") {
  const CameraIntrinsics intr = vga_intrinsics();
  RigidTransform xf;
  xf.translation = Vec3(0, 0, 0.1);

  std::vector<Cluster> clusters;
  clusters.push_back(plane_cluster(0, Vec3(0.05, 0.10, 1.0), Vec3(0, 0, -1)));
  clusters.push_back(plane_cluster(1, Vec3(-0.05, -0.10, 1.0), Vec3(0, 0, -1)));
  clusters.push_back(plane_cluster(2, Vec3(0.0, 0.0, 1.0), Vec3(0, 0, -1)));

  const auto candidates = build_candidates(clusters, intr, xf);
  REQUIRE(candidates.size() == 3);
  CHECK(candidates[0].label == 1);
  CHECK(candidates[1].label == 2);
  CHECK(candidates[2].label == 3);
  // raster order: ascending v
  CHECK(candidates[0].pixel.v < candidates[1].pixel.v);
  CHECK(candidates[1].pixel.v < candidates[2].pixel.v);
  // robot-frame data carried through
  CHECK((candidates[0].point_robot -
         (candidates[0].point_camera + Vec3(0, 0, 0.1))).norm() < 1e-12);
  CHECK(std::abs(candidates[0].normal_robot.norm() - 1.0) < 1e-9);
}

TEST_CASE("build_candidates: behind-camera and out-of-view clusters are dropped") {
  const CameraIntrinsics intr = vga_intrinsics();
  const RigidTransform xf;

  std::vector<Cluster> clusters;
  clusters.push_back(plane_cluster(0, Vec3(0, 0, -0.5), Vec3(0, 0, -1)));
  const auto none = build_candidates(clusters, intr, xf);
  CHECK(none.empty());

  // 5 clusters, 2 projecting outside the image: u = fx * x/z + cx
  clusters.clear();
  clusters.push_back(plane_cluster(0, Vec3(0, 0, 1), Vec3(0, 0, -1)));
  clusters.push_back(plane_cluster(1, Vec3(0.9, 0, 1), Vec3(0, 0, -1)));   // u = 770
  clusters.push_back(plane_cluster(2, Vec3(-0.9, 0, 1), Vec3(0, 0, -1)));  // u = -130
  clusters.push_back(plane_cluster(3, Vec3(0.1, 0.1, 1), Vec3(0, 0, -1)));
  clusters.push_back(plane_cluster(4, Vec3(-0.1, -0.1, 1), Vec3(0, 0, -1)));

  const auto kept = build_candidates(clusters, intr, xf);
  REQUIRE(kept.size() == 3);
  std::set<int> labels;
  for (const auto& c : kept) {
    labels.insert(c.label);
    CHECK(c.pixel.u >= 0);
    CHECK(c.pixel.u < intr.width);
    CHECK(c.pixel.v >= 0);
    CHECK(c.pixel.v < intr.height);
  }
  CHECK(labels == std::set<int>{1, 2, 3});
}

TEST_CASE("build_candidates: unsuctionable clusters are dropped") {
  const CameraIntrinsics intr = vga_intrinsics();
  std::vector<Cluster> clusters;
  clusters.push_back(plane_cluster(0, Vec3(0, 0, 1), Vec3(0, 0, -1)));
  Cluster degenerate;
  degenerate.id = 1;
  degenerate.member_indices = {0, 1};
  degenerate.centroid = Vec3(0.05, 0.05, 1);
  degenerate.normal = std::nullopt;
  clusters.push_back(degenerate);

  const auto kept = build_candidates(clusters, intr, RigidTransform{});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].label == 1);
}

TEST_CASE("label -> 3D point lookup is injective") {
  Rng rng(77);
  const CameraIntrinsics intr = vga_intrinsics();
  std::vector<Cluster> clusters;
  for (int i = 0; i < 12; ++i) {
    clusters.push_back(plane_cluster(
        i,
        Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2),
             rng.uniform(0.8, 1.5)),
        Vec3(rng.gaussian(), rng.gaussian(), -1).normalized()));
  }
  const auto candidates = build_candidates(clusters, intr, RigidTransform{});
  std::set<int> labels;
  std::set<std::pair<double, double>> points;
  for (const auto& c : candidates) {
    labels.insert(c.label);
    points.insert({c.point_camera.x(), c.point_camera.y()});
  }
  CHECK(labels.size() == candidates.size());
  CHECK(points.size() == candidates.size());
  // contiguous 1..m
  CHECK(*labels.begin() == 1);
  CHECK(*labels.rbegin() == static_cast<int>(candidates.size()));
}

TEST_CASE("candidates serialize and digest deterministically") {
  std::vector<Cluster> clusters;
  clusters.push_back(plane_cluster(0, Vec3(0.02, 0.01, 1.1), Vec3(0, 0, -1)));
  clusters.push_back(plane_cluster(1, Vec3(-0.04, 0.03, 0.9), Vec3(0.1, 0, -1)));
  const auto candidates =
      build_candidates(clusters, vga_intrinsics(), RigidTransform{});

  const json doc = candidates_to_json(candidates);
  const auto back = candidates_from_json(doc);
  REQUIRE(back.size() == candidates.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].label == candidates[i].label);
    CHECK((back[i].point_camera - candidates[i].point_camera).norm() == 0.0);
    CHECK((back[i].normal_robot - candidates[i].normal_robot).norm() == 0.0);
  }
  CHECK(candidates_digest(candidates) == candidates_digest(back));
  CHECK(doc.at("digest").get<std::string>() == candidates_digest(candidates));
}

}  // TEST_SUITE
