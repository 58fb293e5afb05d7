// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "suction/errors.hpp"
#include "suction/png_io.hpp"
#include "suction/projection.hpp"
#include "suction/rgbd.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace suction;
using suction::testing::TempDir;

namespace {

CameraIntrinsics small_intrinsics(int w = 4, int h = 4) {
  CameraIntrinsics intr;
  intr.fx = intr.fy = 100.0;
  intr.cx = w / 2.0;
  intr.cy = h / 2.0;
  intr.width = w;
  intr.height = h;
  intr.depth_scale = 0.001;
  return intr;
}

void write_depth_png(const std::filesystem::path& path, int w, int h,
                     const std::vector<std::uint16_t>& data) {
  Gray16Png png;
  png.width = w;
  png.height = h;
  png.data = data;
  write_png_gray16(path, png);
}

}  // namespace

TEST_SUITE("rgbd") {

TEST_CASE("intrinsics validation and matrix assembly") {
  CameraIntrinsics intr = small_intrinsics(640, 480);
  intr.fx = 500;
  intr.fy = 510;
  intr.cx = 320;
  intr.cy = 240;
  CHECK_NOTHROW(intr.validate());

  const Eigen::Matrix3d k = intr.matrix();
  CHECK(k(0, 0) == 500.0);
  CHECK(k(1, 1) == 510.0);
  CHECK(k(0, 2) == 320.0);
  CHECK(k(1, 2) == 240.0);
  CHECK(k(2, 2) == 1.0);
  CHECK(k(1, 0) == 0.0);

  SUBCASE("bad values rejected") {
    CameraIntrinsics bad = intr;
    bad.fx = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = intr;
    bad.cx = 640;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = intr;
    bad.depth_scale = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  SUBCASE("json round trip") {
    const CameraIntrinsics back = CameraIntrinsics::from_json(intr.to_json());
    CHECK(back.fx == intr.fx);
    CHECK(back.depth_scale == intr.depth_scale);
    CHECK(back.width == intr.width);
  }
}

TEST_CASE("load_depth: 4x4 all-zero file has 16 invalid pixels") {
  TempDir dir;
  write_depth_png(dir.file("zero.png"), 4, 4, std::vector<std::uint16_t>(16, 0));
  const DepthFrame frame = load_depth(dir.file("zero.png"), small_intrinsics());
  CHECK(frame.count_valid() == 0);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK_FALSE(frame.valid_at(x, y));
    }
  }
}

TEST_CASE("load_depth: uniform raw 1000 at scale 0.001 reads 1.000 m") {
  TempDir dir;
  write_depth_png(dir.file("plane_1m.png"), 4, 4,
                  std::vector<std::uint16_t>(16, 1000));
  const DepthFrame frame =
      load_depth(dir.file("plane_1m.png"), small_intrinsics());
  CHECK(frame.count_valid() == 16);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(frame.meters_at(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("load_depth: raw 65535 beyond max_range is invalid") {
  TempDir dir;
  std::vector<std::uint16_t> data(16, 1000);
  data[5] = 65535;
  write_depth_png(dir.file("far.png"), 4, 4, data);
  const DepthFrame frame =
      load_depth(dir.file("far.png"), small_intrinsics(), 3.0);
  CHECK(frame.raw_at(1, 1) == 65535);  // raw value preserved
  CHECK_FALSE(frame.valid_at(1, 1));   // but filtered as out of range
  CHECK(frame.count_valid() == 15);
}

TEST_CASE("load_depth error paths") {
  TempDir dir;
  const CameraIntrinsics intr = small_intrinsics();

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_depth(dir.file("nope.png"), intr), IoError);
  }
  SUBCASE("dimension mismatch") {
    write_depth_png(dir.file("wrong.png"), 8, 8,
                    std::vector<std::uint16_t>(64, 100));
    CHECK_THROWS_AS(load_depth(dir.file("wrong.png"), intr), IoError);
  }
  SUBCASE("unsupported bit depth") {
    Rgb8Png rgb;
    rgb.width = 4;
    rgb.height = 4;
    rgb.data.assign(48, 128);
    write_png_rgb8(dir.file("color.png"), rgb);
    CHECK_THROWS_AS(load_depth(dir.file("color.png"), intr), IoError);
  }
}

TEST_CASE("color png round trip") {
  TempDir dir;
  ColorFrame frame = ColorFrame::filled(7, 5, 10, 200, 30);
  frame.set_px(3, 2, 255, 0, 255);
  save_color(dir.file("c.png"), frame);
  const ColorFrame back = load_color(dir.file("c.png"));
  CHECK(back.width == 7);
  CHECK(back.height == 5);
  CHECK(back.data == frame.data);
}

TEST_CASE("deproject: optical-axis pixel lands on the axis") {
  CameraIntrinsics intr = small_intrinsics(641, 481);
  intr.fx = intr.fy = 500;
  intr.cx = 320;
  intr.cy = 240;
  DepthFrame depth;
  depth.width = intr.width;
  depth.height = intr.height;
  depth.depth_scale = intr.depth_scale;
  depth.data.assign(static_cast<std::size_t>(intr.width) * intr.height, 0);
  depth.data[240 * 641 + 320] = 1000;  // exactly (cx, cy), 1.0 m

  const PointCloud cloud = deproject(depth, intr);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0].x() == doctest::Approx(0.0));
  CHECK(cloud.points[0].y() == doctest::Approx(0.0));
  CHECK(cloud.points[0].z() == doctest::Approx(1.0));
  CHECK(cloud.pixels[0] == Eigen::Vector2i(320, 240));
}

TEST_CASE("deproject: hand-evaluated off-axis pixel") {
  // (u - cx) z / fx = 100 * 2 / 500 = 0.4
  CameraIntrinsics intr = small_intrinsics(640, 480);
  intr.fx = intr.fy = 500;
  intr.cx = 320;
  intr.cy = 240;
  DepthFrame depth;
  depth.width = 640;
  depth.height = 480;
  depth.depth_scale = 0.001;
  depth.data.assign(640 * 480, 0);
  depth.data[240 * 640 + 420] = 2000;

  const PointCloud cloud = deproject(depth, intr);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0].x() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cloud.points[0].y() == doctest::Approx(0.0));
  CHECK(cloud.points[0].z() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deproject: all-invalid frame gives an empty cloud") {
  const CameraIntrinsics intr = small_intrinsics();
  DepthFrame depth;
  depth.width = 4;
  depth.height = 4;
  depth.data.assign(16, 0);
  CHECK(deproject(depth, intr).empty());
}

TEST_CASE("deproject: output size equals valid pixel count") {
  Rng rng(7);
  CameraIntrinsics intr = small_intrinsics(32, 24);
  DepthFrame depth;
  depth.width = 32;
  depth.height = 24;
  depth.depth_scale = 0.001;
  depth.max_range = 3.0;
  depth.data.resize(32 * 24);
  for (auto& v : depth.data) {
    const double roll = rng.u01();
    if (roll < 0.3) {
      v = 0;  // no return
    } else if (roll < 0.4) {
      v = 50000;  // out of range
    } else {
      v = static_cast<std::uint16_t>(200 + rng.index(2500));
    }
  }
  const PointCloud cloud = deproject(depth, intr);
  CHECK(static_cast<int>(cloud.size()) == depth.count_valid());
  CHECK(cloud.has_pixels());
  for (const Vec3& p : cloud.points) {
    CHECK(p.z() > 0.0);
    CHECK(p.z() <= 3.0);
  }
}

TEST_CASE("deproject then project recovers each pixel") {
  Rng rng(11);
  CameraIntrinsics intr = suction::testing::random_intrinsics(rng);
  DepthFrame depth;
  depth.width = intr.width;
  depth.height = intr.height;
  depth.depth_scale = intr.depth_scale;
  depth.data.resize(static_cast<std::size_t>(intr.width) * intr.height);
  for (auto& v : depth.data) {
    v = static_cast<std::uint16_t>(100 + rng.index(2800));
  }
  const PointCloud cloud = deproject(depth, intr);
  REQUIRE(cloud.size() == depth.data.size());
  for (std::size_t i = 0; i < cloud.size(); i += 37) {
    const PixelPoint px = project_to_pixel(cloud.points[i], intr);
    CHECK(std::abs(px.u - cloud.pixels[i].x()) < 1e-6);
    CHECK(std::abs(px.v - cloud.pixels[i].y()) < 1e-6);
    const double z = depth.meters_at(cloud.pixels[i].x(), cloud.pixels[i].y());
    CHECK(cloud.points[i].z() == z);  // depth carried over exactly
  }
}

TEST_CASE("crop_workspace") {
  Rng rng(3);
  PointCloud cloud;
  for (int i = 0; i < 10; ++i) {
    cloud.points.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2),
                              rng.uniform(0.1, 4));
    cloud.pixels.emplace_back(i, i);
  }

  SUBCASE("whole-space bounds keep the cloud identical") {
    const Aabb all{Vec3(-10, -10, -10), Vec3(10, 10, 10)};
    const PointCloud out = crop_workspace(cloud, all);
    CHECK(out.points == cloud.points);
    CHECK(out.pixels == cloud.pixels);
  }

  SUBCASE("disjoint bounds produce an empty cloud") {
    const Aabb none{Vec3(50, 50, 50), Vec3(60, 60, 60)};
    CHECK(crop_workspace(cloud, none).empty());
  }

  SUBCASE("membership matches a brute-force filter") {
    const Aabb box{Vec3(-1, -1, 0), Vec3(1, 1, 1)};
    const PointCloud out = crop_workspace(cloud, box);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3& p = cloud.points[i];
      const bool inside = p.x() >= -1 && p.x() <= 1 && p.y() >= -1 &&
                          p.y() <= 1 && p.z() >= 0 && p.z() <= 1;
      if (inside) {
        REQUIRE(expected < out.size());
        CHECK(out.points[expected] == p);
        CHECK(out.pixels[expected] == cloud.pixels[i]);
        ++expected;
      }
    }
    CHECK(out.size() == expected);
  }

  SUBCASE("idempotent and a sub-multiset of the input") {
    const Aabb box{Vec3(-1, -1, 0), Vec3(1, 1, 2)};
    const PointCloud once = crop_workspace(cloud, box);
    const PointCloud twice = crop_workspace(once, box);
    CHECK(once.points == twice.points);
    CHECK(once.size() <= cloud.size());
    for (const Vec3& p : once.points) {
      CHECK(std::find(cloud.points.begin(), cloud.points.end(), p) !=
            cloud.points.end());
    }
  }

  SUBCASE("invalid bounds rejected") {
    CHECK_THROWS_AS(crop_workspace(cloud, Aabb{Vec3(1, 1, 1), Vec3(0, 0, 0)}),
                    ConfigError);
  }
}

}  // TEST_SUITE
