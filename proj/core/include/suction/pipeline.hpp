// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "suction/clustering.hpp"
#include "suction/projection.hpp"
#include "suction/rgbd.hpp"

namespace suction {

struct Proposal {
  PointCloud cloud;
  std::vector<Cluster> clusters;
  std::vector<SuctionCandidate> candidates;
};

/// Depth -> cloud -> crop -> k-means -> normals -> labeled candidates.
/// k shrinks to the cloud size when the cloud is small; degenerate clouds
/// yield an empty candidate set rather than an error.
Proposal propose_candidates(const DepthFrame& depth,
                            const CameraIntrinsics& intr,
                            const ClusteringConfig& clustering,
                            const std::optional<Aabb>& workspace,
                            const RigidTransform& camera_to_robot);

}  // namespace suction
