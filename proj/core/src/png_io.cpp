// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "suction/errors.hpp"

namespace suction {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  return f;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) {
      throw IoError("libpng: out of memory");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) {
      throw IoError("libpng: out of memory");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

bool host_is_little_endian() {
  const std::uint16_t probe = 1;
  return *reinterpret_cast<const std::uint8_t*>(&probe) == 1;
}

}  // namespace

Gray16Png read_png_gray16(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  PngReader r;
  if (setjmp(png_jmpbuf(r.png))) {
    throw IoError("failed to decode PNG " + path.string());
  }
  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  const png_uint_32 w = png_get_image_width(r.png, r.info);
  const png_uint_32 h = png_get_image_height(r.png, r.info);
  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int color_type = png_get_color_type(r.png, r.info);

  if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 16) {
    throw IoError(path.string() +
                  ": unsupported bit depth or color type (expected 16-bit "
                  "single-channel grayscale)");
  }
  if (host_is_little_endian()) {
    png_set_swap(r.png);  // PNG stores 16-bit samples big-endian
  }
  png_read_update_info(r.png, r.info);

  Gray16Png img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.data.resize(static_cast<std::size_t>(w) * h);

  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(img.data.data() +
                                          static_cast<std::size_t>(y) * w);
  }
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return img;
}

void write_png_gray16(const std::filesystem::path& path,
                      const Gray16Png& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() !=
          static_cast<std::size_t>(img.width) * img.height) {
    throw IoError("write_png_gray16: inconsistent image dimensions");
  }
  FilePtr f = open_file(path, "wb");
  PngWriter w;
  if (setjmp(png_jmpbuf(w.png))) {
    throw IoError("failed to encode PNG " + path.string());
  }
  png_init_io(w.png, f.get());
  png_set_compression_level(w.png, 6);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  if (host_is_little_endian()) {
    png_set_swap(w.png);
  }
  for (int y = 0; y < img.height; ++y) {
    png_write_row(w.png,
                  reinterpret_cast<png_const_bytep>(
                      img.data.data() +
                      static_cast<std::size_t>(y) * img.width));
  }
  png_write_end(w.png, nullptr);
}

Rgb8Png read_png_rgb8(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  PngReader r;
  if (setjmp(png_jmpbuf(r.png))) {
    throw IoError("failed to decode PNG " + path.string());
  }
  png_init_io(r.png, f.get());
  png_read_info(r.png, r.info);

  const png_uint_32 w = png_get_image_width(r.png, r.info);
  const png_uint_32 h = png_get_image_height(r.png, r.info);
  const int bit_depth = png_get_bit_depth(r.png, r.info);
  const int color_type = png_get_color_type(r.png, r.info);

  if (bit_depth == 16) {
    throw IoError(path.string() + ": unsupported bit depth (expected 8-bit)");
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(r.png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    png_set_gray_to_rgb(r.png);
  }
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(r.png);
  }
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);

  if (png_get_channels(r.png, r.info) != 3) {
    throw IoError(path.string() + ": could not normalize to RGB");
  }

  Rgb8Png img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.data.resize(static_cast<std::size_t>(w) * h * 3);

  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = img.data.data() + static_cast<std::size_t>(y) * w * 3;
  }
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return img;
}

std::vector<std::uint8_t> encode_png_rgb8(const Rgb8Png& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() !=
          static_cast<std::size_t>(img.width) * img.height * 3) {
    throw IoError("encode_png_rgb8: inconsistent image dimensions");
  }
  PngWriter w;
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(w.png))) {
    throw IoError("failed to encode PNG buffer");
  }
  png_set_write_fn(
      w.png, &out,
      [](png_structp png, png_bytep data, png_size_t len) {
        auto* buf = static_cast<std::vector<std::uint8_t>*>(
            png_get_io_ptr(png));
        buf->insert(buf->end(), data, data + len);
      },
      nullptr);
  png_set_compression_level(w.png, 6);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(w.png, img.data.data() +
                             static_cast<std::size_t>(y) * img.width * 3);
  }
  png_write_end(w.png, nullptr);
  return out;
}

void write_png_rgb8(const std::filesystem::path& path, const Rgb8Png& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() !=
          static_cast<std::size_t>(img.width) * img.height * 3) {
    throw IoError("write_png_rgb8: inconsistent image dimensions");
  }
  FilePtr f = open_file(path, "wb");
  PngWriter w;
  if (setjmp(png_jmpbuf(w.png))) {
    throw IoError("failed to encode PNG " + path.string());
  }
  png_init_io(w.png, f.get());
  png_set_compression_level(w.png, 6);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);
  for (int y = 0; y < img.height; ++y) {
    png_write_row(w.png, img.data.data() +
                             static_cast<std::size_t>(y) * img.width * 3);
  }
  png_write_end(w.png, nullptr);
}

}  // namespace suction
