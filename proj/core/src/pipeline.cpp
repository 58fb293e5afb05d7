// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace suction {

Proposal propose_candidates(const DepthFrame& depth,
                            const CameraIntrinsics& intr,
                            const ClusteringConfig& clustering,
                            const std::optional<Aabb>& workspace,
                            const RigidTransform& camera_to_robot) {
  Proposal out;
  out.cloud = deproject(depth, intr);
  if (workspace) {
    out.cloud = crop_workspace(out.cloud, *workspace);
  }
  if (out.cloud.empty()) {
    return out;
  }

  ClusteringConfig cfg = clustering;
  cfg.k = std::min<int>(cfg.k, static_cast<int>(out.cloud.size()));
  try {
    out.clusters = kmeans(out.cloud, cfg).clusters;
  } catch (const std::invalid_argument&) {
    // Fewer distinct points than clusters; nothing suctionable here.
    return out;
  }
  attach_normals(out.clusters, out.cloud);
  out.candidates = build_candidates(out.clusters, intr, camera_to_robot);
  return out;
}

}  // namespace suction
