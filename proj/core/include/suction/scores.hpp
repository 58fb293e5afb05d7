// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "suction/json_util.hpp"

namespace suction {

/// Per-candidate suitability scores, each in [0, 1]; total is the
/// configured weighted sum. Filled by the oracle decider.
struct GeometricScores {
  double flatness = 0.0;
  double accessibility = 0.0;
  double perpendicularity = 0.0;
  double stability = 0.0;
  double total = 0.0;

  json to_json() const {
    return json{{"flatness", flatness},
                {"accessibility", accessibility},
                {"perpendicularity", perpendicularity},
                {"stability", stability},
                {"total", total}};
  }

  static GeometricScores from_json(const json& j) {
    GeometricScores s;
    s.flatness = j.at("flatness").get<double>();
    s.accessibility = j.at("accessibility").get<double>();
    s.perpendicularity = j.at("perpendicularity").get<double>();
    s.stability = j.at("stability").get<double>();
    s.total = j.at("total").get<double>();
    return s;
  }
};

}  // namespace suction
