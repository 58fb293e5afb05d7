// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/geometry.hpp"

#include "suction/errors.hpp"

namespace suction {

void Aabb::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(min[i] < max[i])) {
      throw ConfigError("Aabb: min must be < max componentwise");
    }
  }
}

Aabb Aabb::from_json(const json& j) {
  Aabb box;
  const auto& lo = j.at("min");
  const auto& hi = j.at("max");
  for (int i = 0; i < 3; ++i) {
    box.min[i] = lo.at(static_cast<std::size_t>(i)).get<double>();
    box.max[i] = hi.at(static_cast<std::size_t>(i)).get<double>();
  }
  box.validate();
  return box;
}

json Aabb::to_json() const {
  return json{{"min", {min.x(), min.y(), min.z()}},
              {"max", {max.x(), max.y(), max.z()}}};
}

}  // namespace suction
