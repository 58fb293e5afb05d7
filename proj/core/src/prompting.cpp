// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "suction/errors.hpp"
#include "suction/prompt_defaults.hpp"

namespace suction {

namespace {

// 5x7 digit glyphs, one byte per row, 5 low bits used (MSB-left).
constexpr std::uint8_t kDigitGlyphs[10][7] = {
    {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e},  // 0
    {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},  // 1
    {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f},  // 2
    {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},  // 3
    {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02},  // 4
    {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},  // 5
    {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e},  // 6
    {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e},  // 8
    {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c},  // 9
};
constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;

void put_px(ColorFrame& img, int x, int y, const Rgb& c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.set_px(x, y, c[0], c[1], c[2]);
}

void draw_label_text(ColorFrame& img, int cx, int cy, int label, int scale,
                     const Rgb& color) {
  std::string digits = std::to_string(label);
  const int n = static_cast<int>(digits.size());
  const int total_w = n * kGlyphW * scale + (n - 1) * scale;
  const int total_h = kGlyphH * scale;
  int x0 = cx - total_w / 2;
  const int y0 = cy - total_h / 2;
  for (char ch : digits) {
    const std::uint8_t* glyph = kDigitGlyphs[ch - '0'];
    for (int gy = 0; gy < kGlyphH; ++gy) {
      for (int gx = 0; gx < kGlyphW; ++gx) {
        if (!(glyph[gy] & (1 << (kGlyphW - 1 - gx)))) continue;
        for (int sy = 0; sy < scale; ++sy) {
          for (int sx = 0; sx < scale; ++sx) {
            put_px(img, x0 + gx * scale + sx, y0 + gy * scale + sy, color);
          }
        }
      }
    }
    x0 += (kGlyphW + 1) * scale;
  }
}

void draw_marker(ColorFrame& img, int cx, int cy, int label,
                 const MarkerStyle& style, const Rgb& circle_color) {
  const int r = style.circle_radius;
  const int outer = r + style.stroke_width;
  for (int dy = -outer; dy <= outer; ++dy) {
    for (int dx = -outer; dx <= outer; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 <= r * r) {
        put_px(img, cx + dx, cy + dy, circle_color);
      } else if (d2 <= outer * outer) {
        put_px(img, cx + dx, cy + dy, style.stroke_color);
      }
    }
  }
  const int scale = std::max(1, style.font_height / kGlyphH);
  draw_label_text(img, cx, cy, label, scale, style.text_color);
}

}  // namespace

json PromptBundle::to_json() const {
  return json{{"role", role}, {"premise", premise}, {"directive", directive}};
}

PromptBundle PromptBundle::from_json(const json& j) {
  PromptBundle b;
  b.role = j.at("role").get<std::string>();
  b.premise = j.at("premise").get<std::string>();
  b.directive = j.at("directive").get<std::string>();
  return b;
}

const std::string& default_role_text() {
  static const std::string text = detail::kDefaultRoleText;
  return text;
}

const std::string& default_premise_text() {
  static const std::string text = detail::kDefaultPremiseText;
  return text;
}

PromptBundle assemble_prompt(const std::string& directive,
                             const std::optional<std::string>& role_override,
                             const std::optional<std::string>& premise_override) {
  if (directive.empty()) {
    throw std::invalid_argument("assemble_prompt: directive must be non-empty");
  }
  PromptBundle bundle;
  bundle.role = role_override.value_or(default_role_text());
  bundle.premise = premise_override.value_or(default_premise_text());
  bundle.directive = directive;
  return bundle;
}

void MarkerStyle::validate() const {
  if (circle_radius <= 0 || stroke_width < 0 || font_height <= 0) {
    throw ConfigError("marker style: sizes must be positive");
  }
  if (circle_radius < font_height / 2) {
    throw ConfigError(
        "marker style: circle_radius must be >= font_height / 2");
  }
}

MarkerStyle MarkerStyle::from_json(const json& j) {
  MarkerStyle s;
  s.circle_radius = j.value("circle_radius", s.circle_radius);
  s.stroke_width = j.value("stroke_width", s.stroke_width);
  s.font_height = j.value("font_height", s.font_height);
  auto read_rgb = [&j](const char* key, Rgb& out) {
    if (!j.contains(key)) return;
    for (std::size_t i = 0; i < 3; ++i) {
      out[i] = static_cast<std::uint8_t>(j.at(key).at(i).get<int>());
    }
  };
  read_rgb("circle_color", s.circle_color);
  read_rgb("text_color", s.text_color);
  read_rgb("stroke_color", s.stroke_color);
  s.validate();
  return s;
}

json MarkerStyle::to_json() const {
  return json{
      {"circle_radius", circle_radius},
      {"circle_color", {circle_color[0], circle_color[1], circle_color[2]}},
      {"text_color", {text_color[0], text_color[1], text_color[2]}},
      {"stroke_width", stroke_width},
      {"stroke_color", {stroke_color[0], stroke_color[1], stroke_color[2]}},
      {"font_height", font_height}};
}

AnnotatedImage render_markers(const ColorFrame& image,
                              const std::vector<SuctionCandidate>& candidates,
                              const MarkerStyle& style) {
  return render_markers_colored(
      image, candidates, style,
      std::vector<Rgb>(candidates.size(), style.circle_color));
}

AnnotatedImage render_markers_colored(
    const ColorFrame& image, const std::vector<SuctionCandidate>& candidates,
    const MarkerStyle& style, const std::vector<Rgb>& circle_colors) {
  style.validate();
  if (circle_colors.size() != candidates.size()) {
    throw std::invalid_argument(
        "render_markers_colored: one color per candidate required");
  }
  AnnotatedImage out;
  out.pixels = image;

  // Ascending label order so later labels overdraw earlier ones.
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].label < candidates[b].label;
  });

  out.legend.reserve(candidates.size());
  for (std::size_t i : order) {
    const SuctionCandidate& c = candidates[i];
    const int cx = static_cast<int>(std::lround(c.pixel.u));
    const int cy = static_cast<int>(std::lround(c.pixel.v));
    draw_marker(out.pixels, cx, cy, c.label, style, circle_colors[i]);
    out.legend.emplace_back(c.label, Eigen::Vector2i(cx, cy));
  }
  return out;
}

}  // namespace suction
