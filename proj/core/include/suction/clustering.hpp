// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "suction/json_util.hpp"
#include "suction/random.hpp"
#include "suction/rgbd.hpp"

namespace suction {

struct ClusteringConfig {
  int k = 15;
  int max_iterations = 50;
  double convergence_eps = 1e-5;  // meters, max centroid shift
  std::uint64_t rng_seed = 0;
  /// Independent seeding+Lloyd passes; the lowest-inertia result wins.
  /// Single runs get stuck in local minima often enough to matter.
  int restarts = 8;

  void validate() const;

  static ClusteringConfig from_json(const json& j);
  json to_json() const;
};

/// One point-cloud segment. The normal is unset for degenerate clusters
/// (fewer than 3 points, or collinear members); such clusters cannot host
/// a suction cup and are excluded from candidate generation.
struct Cluster {
  int id = 0;
  std::vector<int> member_indices;
  Vec3 centroid = Vec3::Zero();
  std::optional<Vec3> normal;

  bool suctionable() const { return normal.has_value(); }
};

struct KMeansResult {
  std::vector<Cluster> clusters;
  int iterations = 0;
  /// Inertia recorded after each assign+update pass; non-increasing.
  std::vector<double> inertia_history;
};

/// D^2-weighted seeding: the first center is drawn uniformly from the
/// input, each further center with probability proportional to the squared
/// distance to its nearest already-chosen center. Deterministic given the
/// rng state. Throws std::invalid_argument when the input is empty or k
/// exceeds the number of distinct points.
std::vector<Vec3> kmeans_pp_seed(const PointCloud& points, int k, Rng& rng);

/// Lloyd iterations from K-means++ seeds. Stops when the largest centroid
/// shift drops below convergence_eps or after max_iterations. Empty
/// clusters are repaired by reseeding from the farthest member of the
/// largest cluster, so exactly k clusters come back. Normals are unset.
KMeansResult kmeans(const PointCloud& points, const ClusteringConfig& cfg);

/// Componentwise arithmetic mean. Throws std::invalid_argument on empty
/// input.
Vec3 compute_centroid(const std::vector<Vec3>& members);

/// Least-squares plane normal of the members about the centroid (smallest
/// covariance eigenvector), oriented toward the camera origin so that
/// normal . (-centroid) > 0. Returns nullopt for degenerate clusters.
std::optional<Vec3> estimate_normal(const std::vector<Vec3>& members,
                                    const Vec3& centroid);

/// Fill in cluster normals from their members. Degenerate clusters keep
/// normal unset.
void attach_normals(std::vector<Cluster>& clusters, const PointCloud& cloud);

/// Sum of squared point-to-assigned-centroid distances.
double clustering_inertia(const PointCloud& points,
                          const std::vector<Cluster>& clusters);

}  // namespace suction
