// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/rgbd.hpp"

#include <algorithm>

#include "suction/errors.hpp"
#include "suction/png_io.hpp"

namespace suction {

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = fx;
  k(1, 1) = fy;
  k(0, 2) = cx;
  k(1, 2) = cy;
  return k;
}

void CameraIntrinsics::validate() const {
  if (fx <= 0.0 || fy <= 0.0) {
    throw ConfigError("intrinsics: focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw ConfigError("intrinsics: image size must be positive");
  }
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height) {
    throw ConfigError("intrinsics: principal point outside image");
  }
  if (depth_scale <= 0.0) {
    throw ConfigError("intrinsics: depth_scale must be positive");
  }
}

CameraIntrinsics CameraIntrinsics::from_json(const json& j) {
  CameraIntrinsics intr;
  intr.fx = j.at("fx").get<double>();
  intr.fy = j.at("fy").get<double>();
  intr.cx = j.at("cx").get<double>();
  intr.cy = j.at("cy").get<double>();
  intr.width = j.at("width").get<int>();
  intr.height = j.at("height").get<int>();
  intr.depth_scale = j.at("depth_scale").get<double>();
  intr.validate();
  return intr;
}

json CameraIntrinsics::to_json() const {
  return json{{"fx", fx},         {"fy", fy},
              {"cx", cx},         {"cy", cy},
              {"width", width},   {"height", height},
              {"depth_scale", depth_scale}};
}

CameraIntrinsics load_intrinsics(const std::filesystem::path& path) {
  return CameraIntrinsics::from_json(load_json_file(path));
}

int DepthFrame::count_valid() const {
  int n = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (valid_at(x, y)) ++n;
    }
  }
  return n;
}

ColorFrame ColorFrame::filled(int w, int h, std::uint8_t r, std::uint8_t g,
                              std::uint8_t b) {
  ColorFrame frame;
  frame.width = w;
  frame.height = h;
  frame.data.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < frame.data.size(); i += 3) {
    frame.data[i] = r;
    frame.data[i + 1] = g;
    frame.data[i + 2] = b;
  }
  return frame;
}

bool Mask::any() const {
  return std::any_of(data.begin(), data.end(),
                     [](std::uint8_t v) { return v != 0; });
}

DepthFrame load_depth(const std::filesystem::path& path,
                      const CameraIntrinsics& intr, double max_range) {
  intr.validate();
  Gray16Png png = read_png_gray16(path);
  if (png.width != intr.width || png.height != intr.height) {
    throw IoError(path.string() + ": depth dimensions " +
                  std::to_string(png.width) + "x" +
                  std::to_string(png.height) +
                  " do not match intrinsics " + std::to_string(intr.width) +
                  "x" + std::to_string(intr.height));
  }
  DepthFrame frame;
  frame.width = png.width;
  frame.height = png.height;
  frame.data = std::move(png.data);
  frame.depth_scale = intr.depth_scale;
  frame.max_range = max_range;
  return frame;
}

void save_depth(const std::filesystem::path& path, const DepthFrame& frame) {
  Gray16Png png;
  png.width = frame.width;
  png.height = frame.height;
  png.data = frame.data;
  write_png_gray16(path, png);
}

ColorFrame load_color(const std::filesystem::path& path) {
  Rgb8Png png = read_png_rgb8(path);
  ColorFrame frame;
  frame.width = png.width;
  frame.height = png.height;
  frame.data = std::move(png.data);
  return frame;
}

void save_color(const std::filesystem::path& path, const ColorFrame& frame) {
  Rgb8Png png;
  png.width = frame.width;
  png.height = frame.height;
  png.data = frame.data;
  write_png_rgb8(path, png);
}

PointCloud deproject(const DepthFrame& depth, const CameraIntrinsics& intr) {
  if (depth.width != intr.width || depth.height != intr.height) {
    throw ConfigError("deproject: frame and intrinsics dimensions differ");
  }
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(depth.width) * depth.height);
  cloud.pixels.reserve(cloud.points.capacity());
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      if (!depth.valid_at(u, v)) continue;
      const double z = depth.meters_at(u, v);
      cloud.points.emplace_back((u - intr.cx) * z / intr.fx,
                                (v - intr.cy) * z / intr.fy, z);
      cloud.pixels.emplace_back(u, v);
    }
  }
  return cloud;
}

PointCloud crop_workspace(const PointCloud& cloud, const Aabb& bounds) {
  bounds.validate();
  PointCloud out;
  const bool track_pixels = cloud.has_pixels();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!bounds.contains(cloud.points[i])) continue;
    out.points.push_back(cloud.points[i]);
    if (track_pixels) out.pixels.push_back(cloud.pixels[i]);
  }
  return out;
}

}  // namespace suction
