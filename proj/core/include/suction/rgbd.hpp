// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "suction/geometry.hpp"
#include "suction/json_util.hpp"

namespace suction {

/// Depth readings beyond this are treated as no-return (out of reach for a
/// shelf-scale workspace). Overridable at load time.
inline constexpr double kDefaultMaxRange = 3.0;

/// Pinhole intrinsics in factored form. The camera frame is +z forward,
/// +x right, +y down.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  double depth_scale = 0.001;  // meters per raw depth unit

  /// 3x3 K matrix assembled from the factored parameters.
  Eigen::Matrix3d matrix() const;

  void validate() const;

  static CameraIntrinsics from_json(const json& j);
  json to_json() const;
};

CameraIntrinsics load_intrinsics(const std::filesystem::path& path);

/// Raw depth grid. Zero means no return; values whose metric conversion
/// exceeds max_range are also treated as invalid.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;
  double depth_scale = 0.001;
  double max_range = kDefaultMaxRange;

  std::uint16_t raw_at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  double meters_at(int x, int y) const { return raw_at(x, y) * depth_scale; }
  bool valid_at(int x, int y) const {
    const std::uint16_t raw = raw_at(x, y);
    return raw != 0 && raw * depth_scale <= max_range;
  }
  int count_valid() const;
};

struct ColorFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major RGB triples

  static ColorFrame filled(int w, int h, std::uint8_t r, std::uint8_t g,
                           std::uint8_t b);

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  void set_px(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t o = offset(x, y);
    data[o] = r;
    data[o + 1] = g;
    data[o + 2] = b;
  }
};

/// Binary pixel mask, image-shaped. Nonzero = selected.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  static Mask zeros(int w, int h) {
    return Mask{w, h, std::vector<std::uint8_t>(
                          static_cast<std::size_t>(w) * h, 0)};
  }
  bool at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return data[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  bool any() const;
};

/// Camera-frame 3D points, all z > 0 and finite. pixels[i] is the image
/// pixel each point was deprojected from (empty when unknown).
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Eigen::Vector2i> pixels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_pixels() const { return pixels.size() == points.size(); }
};

/// Read a 16-bit grayscale depth PNG; dimensions must match the
/// intrinsics. Throws IoError on format problems.
DepthFrame load_depth(const std::filesystem::path& path,
                      const CameraIntrinsics& intr,
                      double max_range = kDefaultMaxRange);
void save_depth(const std::filesystem::path& path, const DepthFrame& frame);

ColorFrame load_color(const std::filesystem::path& path);
void save_color(const std::filesystem::path& path, const ColorFrame& frame);

/// Inverse pinhole model: each valid pixel (u, v) with depth z becomes
/// ((u - cx) z / fx, (v - cy) z / fy, z). Invalid pixels are skipped.
PointCloud deproject(const DepthFrame& depth, const CameraIntrinsics& intr);

/// Keep only points inside bounds; pixel-of-origin entries follow along.
PointCloud crop_workspace(const PointCloud& cloud, const Aabb& bounds);

}  // namespace suction
