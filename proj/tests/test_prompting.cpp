// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "suction/errors.hpp"
#include "suction/prompting.hpp"

using namespace suction;

namespace {

SuctionCandidate candidate_at(int label, double u, double v) {
  SuctionCandidate c;
  c.label = label;
  c.pixel = PixelPoint{u, v};
  c.point_camera = Vec3(0, 0, 1);
  c.normal_camera = Vec3(0, 0, -1);
  return c;
}

ColorFrame test_image(int w = 120, int h = 90) {
  ColorFrame img = ColorFrame::filled(w, h, 60, 80, 100);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if ((x + y) % 7 == 0) img.set_px(x, y, 140, 90, 40);
    }
  }
  return img;
}

}  // namespace

TEST_SUITE("prompting") {

TEST_CASE("assemble_prompt applies the default templates") {
  const PromptBundle b = assemble_prompt("Pick up the cola.");
  CHECK(b.role == default_role_text());
  CHECK(b.premise == default_premise_text());
  CHECK(b.directive == "Pick up the cola.");
  // sanity on the shipped templates
  CHECK(b.role.find("picking robot") != std::string::npos);
  CHECK(b.role.find("return to the initial position") != std::string::npos);
  CHECK(b.premise.find("suction pad") != std::string::npos);
  CHECK(b.premise.find("Flatness") != std::string::npos);
  CHECK(b.premise.find("Stability") != std::string::npos);
  CHECK(b.premise.find("circled numbers") != std::string::npos);
}

TEST_CASE("assemble_prompt override semantics") {
  const PromptBundle b =
      assemble_prompt("Pick the coffee bag from the side.",
                      std::string("You are a warehouse robot."), std::nullopt);
  CHECK(b.role == "You are a warehouse robot.");
  CHECK(b.premise == default_premise_text());  // untouched by role override
  CHECK(b.directive == "Pick the coffee bag from the side.");
}

TEST_CASE("assemble_prompt rejects empty directives") {
  CHECK_THROWS_AS(assemble_prompt(""), std::invalid_argument);
}

TEST_CASE("prompt bundle serialization is lossless and stable") {
  const PromptBundle b = assemble_prompt("Pick the coffee bag from the side.");
  const std::string once = b.to_json().dump();
  const PromptBundle back = PromptBundle::from_json(json::parse(once));
  CHECK(back.role == b.role);
  CHECK(back.premise == b.premise);
  CHECK(back.directive == b.directive);
  CHECK(back.to_json().dump() == once);  // byte-exact round trip
}

TEST_CASE("render_markers: empty candidate set leaves the image untouched") {
  const ColorFrame img = test_image();
  const AnnotatedImage out = render_markers(img, {});
  CHECK(out.pixels.data == img.data);
  CHECK(out.legend.empty());
}

TEST_CASE("render_markers: single marker confined to its bounding box") {
  const ColorFrame img = test_image();
  MarkerStyle style;
  const auto out = render_markers(img, {candidate_at(1, 60.3, 44.7)}, style);

  REQUIRE(out.legend.size() == 1);
  CHECK(out.legend[0].first == 1);
  const Eigen::Vector2i center = out.legend[0].second;
  CHECK(center == Eigen::Vector2i(60, 45));  // rounded to nearest pixel

  const int reach = style.circle_radius + style.stroke_width;
  int changed_outside = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const bool inside_box = std::abs(x - center.x()) <= reach &&
                              std::abs(y - center.y()) <= reach;
      const std::size_t o = img.offset(x, y);
      const bool same = img.data[o] == out.pixels.data[o] &&
                        img.data[o + 1] == out.pixels.data[o + 1] &&
                        img.data[o + 2] == out.pixels.data[o + 2];
      if (!inside_box && !same) ++changed_outside;
    }
  }
  CHECK(changed_outside == 0);

  // circle fill present at an off-glyph spot inside the disk
  const std::size_t probe =
      out.pixels.offset(center.x() + style.circle_radius - 2, center.y());
  CHECK(out.pixels.data[probe] == style.circle_color[0]);
  // outline ring just past the disk
  const std::size_t ring =
      out.pixels.offset(center.x() + style.circle_radius + 1, center.y());
  CHECK(out.pixels.data[ring] == style.stroke_color[0]);
  // the label glyph puts text_color pixels near the center
  bool found_text = false;
  for (int dy = -6; dy <= 6 && !found_text; ++dy) {
    for (int dx = -6; dx <= 6 && !found_text; ++dx) {
      const std::size_t o = out.pixels.offset(center.x() + dx, center.y() + dy);
      if (out.pixels.data[o] == style.text_color[0] &&
          out.pixels.data[o + 1] == style.text_color[1] &&
          out.pixels.data[o + 2] == style.text_color[2]) {
        found_text = true;
      }
    }
  }
  CHECK(found_text);
}

TEST_CASE("render_markers: later labels overdraw earlier ones") {
  const ColorFrame img = test_image();
  const auto a = candidate_at(1, 50, 40);
  const auto b = candidate_at(2, 53, 40);  // 3 px apart, heavy overlap

  const AnnotatedImage both = render_markers(img, {a, b});
  REQUIRE(both.legend.size() == 2);
  CHECK(both.legend[0].first == 1);
  CHECK(both.legend[1].first == 2);

  // Composing sequentially with 2 drawn last gives the identical image.
  const AnnotatedImage first = render_markers(img, {a});
  const AnnotatedImage stacked = render_markers(first.pixels, {b});
  CHECK(both.pixels.data == stacked.pixels.data);

  // Input order must not matter; label order decides the overdraw.
  const AnnotatedImage swapped = render_markers(img, {b, a});
  CHECK(both.pixels.data == swapped.pixels.data);
}

TEST_CASE("render_markers is deterministic") {
  const ColorFrame img = test_image();
  const std::vector<SuctionCandidate> cands{candidate_at(1, 30, 30),
                                            candidate_at(2, 80, 60),
                                            candidate_at(12, 100, 20)};
  const AnnotatedImage a = render_markers(img, cands);
  const AnnotatedImage b = render_markers(img, cands);
  CHECK(a.pixels.data == b.pixels.data);
  CHECK(a.legend == b.legend);
}

TEST_CASE("legend is a bijection onto the candidate set") {
  const ColorFrame img = test_image();
  std::vector<SuctionCandidate> cands;
  for (int i = 1; i <= 9; ++i) {
    cands.push_back(candidate_at(i, 10.0 + 12 * i, 8.0 + 8 * i));
  }
  const AnnotatedImage out = render_markers(img, cands);
  REQUIRE(out.legend.size() == cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CHECK(out.legend[i].first == cands[i].label);
    CHECK(out.legend[i].second.x() ==
          static_cast<int>(std::lround(cands[i].pixel.u)));
    CHECK(out.legend[i].second.y() ==
          static_cast<int>(std::lround(cands[i].pixel.v)));
  }
}

TEST_CASE("marker style validation") {
  MarkerStyle style;
  CHECK_NOTHROW(style.validate());
  style.font_height = 40;  // numbers would spill out of the circle
  CHECK_THROWS_AS(style.validate(), ConfigError);
  style = MarkerStyle{};
  style.circle_radius = 0;
  CHECK_THROWS_AS(style.validate(), ConfigError);

  const MarkerStyle parsed = MarkerStyle::from_json(
      json{{"circle_radius", 10}, {"circle_color", {1, 2, 3}}});
  CHECK(parsed.circle_radius == 10);
  CHECK(parsed.circle_color == Rgb{1, 2, 3});
  CHECK(parsed.font_height == MarkerStyle{}.font_height);
}

}  // TEST_SUITE
