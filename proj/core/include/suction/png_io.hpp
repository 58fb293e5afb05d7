// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace suction {

struct Gray16Png {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;  // row-major
};

struct Rgb8Png {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major RGB triples
};

// Strict single-channel 16-bit reader; other layouts raise IoError with an
// "unsupported bit depth" style message. Writers use fixed libpng settings
// so repeated runs emit byte-identical files.
Gray16Png read_png_gray16(const std::filesystem::path& path);
void write_png_gray16(const std::filesystem::path& path, const Gray16Png& img);

// 8-bit color reader; grayscale and palette inputs are expanded to RGB,
// alpha is stripped, 16-bit color is rejected.
Rgb8Png read_png_rgb8(const std::filesystem::path& path);
void write_png_rgb8(const std::filesystem::path& path, const Rgb8Png& img);

// In-memory encode, same fixed settings as the file writer. Used to embed
// annotated images into HTTP requests.
std::vector<std::uint8_t> encode_png_rgb8(const Rgb8Png& img);

}  // namespace suction
