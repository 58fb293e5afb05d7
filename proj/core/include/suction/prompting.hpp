// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suction/projection.hpp"
#include "suction/rgbd.hpp"

namespace suction {

/// The three text components sent with every query: a role description, a
/// premise describing the hardware and selection criteria, and the user's
/// directive. Messages go out in role, premise, directive order.
struct PromptBundle {
  std::string role;
  std::string premise;
  std::string directive;

  json to_json() const;
  static PromptBundle from_json(const json& j);
};

/// Default role/premise templates. These are versioned text assets under
/// core/assets/prompts/, embedded at build time.
const std::string& default_role_text();
const std::string& default_premise_text();

/// Build a bundle from the directive, using the default templates unless
/// overrides are given. Throws std::invalid_argument on empty directive.
PromptBundle assemble_prompt(
    const std::string& directive,
    const std::optional<std::string>& role_override = std::nullopt,
    const std::optional<std::string>& premise_override = std::nullopt);

using Rgb = std::array<std::uint8_t, 3>;

struct MarkerStyle {
  int circle_radius = 14;
  Rgb circle_color{255, 255, 255};
  Rgb text_color{0, 0, 0};
  int stroke_width = 2;
  Rgb stroke_color{40, 40, 40};
  int font_height = 10;

  void validate() const;

  static MarkerStyle from_json(const json& j);
  json to_json() const;
};

/// Image with numbered-circle markers burned in. legend lists exactly the
/// (label, integer center) pairs that were drawn.
struct AnnotatedImage {
  ColorFrame pixels;
  std::vector<std::pair<int, Eigen::Vector2i>> legend;
};

/// Overlay one filled, outlined circle per candidate with its label
/// rendered inside, in ascending label order (later markers overdraw
/// earlier ones). The source image is not modified outside the marker
/// bounding boxes.
AnnotatedImage render_markers(const ColorFrame& image,
                              const std::vector<SuctionCandidate>& candidates,
                              const MarkerStyle& style = MarkerStyle{});

/// Same, with a per-candidate circle color (parallel to candidates). Used
/// by the post-decision visualization.
AnnotatedImage render_markers_colored(
    const ColorFrame& image, const std::vector<SuctionCandidate>& candidates,
    const MarkerStyle& style, const std::vector<Rgb>& circle_colors);

}  // namespace suction
