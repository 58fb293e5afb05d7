// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/clustering.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "suction/errors.hpp"

namespace suction {

namespace {

std::size_t count_distinct(const std::vector<Vec3>& points) {
  struct Key {
    std::uint64_t x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<std::uint64_t>{}(k.x);
      h ^= std::hash<std::uint64_t>{}(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6);
      h ^= std::hash<std::uint64_t>{}(k.z) + 0x9e3779b97f4a7c15ULL + (h << 6);
      return h;
    }
  };
  std::unordered_set<Key, KeyHash> seen;
  seen.reserve(points.size());
  for (const Vec3& p : points) {
    Key k;
    std::memcpy(&k.x, &p.x(), sizeof(double));
    std::memcpy(&k.y, &p.y(), sizeof(double));
    std::memcpy(&k.z, &p.z(), sizeof(double));
    seen.insert(k);
  }
  return seen.size();
}

/// Cumulative-sum sampling of an index with weight proportional to w[i].
std::size_t sample_weighted(const std::vector<double>& w, double total,
                            Rng& rng) {
  const double r = rng.u01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (r < acc) return i;
  }
  // Fall off the end only through rounding; return the last positive weight.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return w.size() - 1;
}

}  // namespace

void ClusteringConfig::validate() const {
  if (k < 1) throw ConfigError("clustering: k must be >= 1");
  if (max_iterations < 1) {
    throw ConfigError("clustering: max_iterations must be >= 1");
  }
  if (convergence_eps <= 0.0) {
    throw ConfigError("clustering: convergence_eps must be > 0");
  }
  if (restarts < 1) {
    throw ConfigError("clustering: restarts must be >= 1");
  }
}

ClusteringConfig ClusteringConfig::from_json(const json& j) {
  ClusteringConfig cfg;
  cfg.k = j.value("k", cfg.k);
  cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  cfg.convergence_eps = j.value("convergence_eps", cfg.convergence_eps);
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.validate();
  return cfg;
}

json ClusteringConfig::to_json() const {
  return json{{"k", k},
              {"max_iterations", max_iterations},
              {"convergence_eps", convergence_eps},
              {"rng_seed", rng_seed},
              {"restarts", restarts}};
}

std::vector<Vec3> kmeans_pp_seed(const PointCloud& points, int k, Rng& rng) {
  const std::vector<Vec3>& pts = points.points;
  if (pts.empty()) {
    throw std::invalid_argument("kmeans_pp_seed: empty point set");
  }
  if (k < 1) {
    throw std::invalid_argument("kmeans_pp_seed: k must be >= 1");
  }
  if (static_cast<std::size_t>(k) > pts.size() ||
      (k > 1 && static_cast<std::size_t>(k) > count_distinct(pts))) {
    throw std::invalid_argument(
        "kmeans_pp_seed: k exceeds number of distinct points");
  }

  std::vector<Vec3> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(pts[rng.index(pts.size())]);

  std::vector<double> min_sq(pts.size(),
                             std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = (pts[i] - centers.back()).squaredNorm();
      if (d < min_sq[i]) min_sq[i] = d;
      total += min_sq[i];
    }
    centers.push_back(pts[sample_weighted(min_sq, total, rng)]);
  }
  return centers;
}

namespace {

KMeansResult run_lloyd(const PointCloud& points, const ClusteringConfig& cfg,
                       Rng& rng) {
  const std::vector<Vec3>& pts = points.points;
  std::vector<Vec3> centers = kmeans_pp_seed(points, cfg.k, rng);

  const std::size_t n = pts.size();
  const int k = cfg.k;
  std::vector<int> assignment(n, 0);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);

  KMeansResult result;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    // Assignment; ties go to the lowest cluster id.
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (pts[i] - centers[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d =
            (pts[i] - centers[static_cast<std::size_t>(c)]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      ++counts[static_cast<std::size_t>(best)];
    }

    // Repair empty clusters from the farthest member of the largest one.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      int donor = static_cast<int>(std::max_element(counts.begin(),
                                                    counts.end()) -
                                   counts.begin());
      if (counts[static_cast<std::size_t>(donor)] <= 1) break;
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] != donor) continue;
        const double d =
            (pts[i] - centers[static_cast<std::size_t>(donor)]).squaredNorm();
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      assignment[farthest] = c;
      centers[static_cast<std::size_t>(c)] = pts[farthest];
      --counts[static_cast<std::size_t>(donor)];
      ++counts[static_cast<std::size_t>(c)];
    }

    // Centroid update, accumulated in index order for reproducibility.
    std::vector<Vec3> next(static_cast<std::size_t>(k), Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i) {
      next[static_cast<std::size_t>(assignment[i])] += pts[i];
    }
    double max_shift_sq = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      if (counts[cc] > 0) {
        next[cc] /= static_cast<double>(counts[cc]);
      } else {
        next[cc] = centers[cc];
      }
      max_shift_sq = std::max(max_shift_sq,
                              (next[cc] - centers[cc]).squaredNorm());
      centers[cc] = next[cc];
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia +=
          (pts[i] - centers[static_cast<std::size_t>(assignment[i])])
              .squaredNorm();
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;

    if (max_shift_sq < cfg.convergence_eps * cfg.convergence_eps) break;
  }

  result.clusters.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    auto& cluster = result.clusters[static_cast<std::size_t>(c)];
    cluster.id = c;
    cluster.centroid = centers[static_cast<std::size_t>(c)];
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.clusters[static_cast<std::size_t>(assignment[i])]
        .member_indices.push_back(static_cast<int>(i));
  }
  return result;
}

}  // namespace

KMeansResult kmeans(const PointCloud& points, const ClusteringConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  KMeansResult best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    KMeansResult result = run_lloyd(points, cfg, rng);
    const double inertia = clustering_inertia(points, result.clusters);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(result);
    }
  }
  return best;
}

Vec3 compute_centroid(const std::vector<Vec3>& members) {
  if (members.empty()) {
    throw std::invalid_argument("compute_centroid: empty member set");
  }
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : members) sum += p;
  return sum / static_cast<double>(members.size());
}

std::optional<Vec3> estimate_normal(const std::vector<Vec3>& members,
                                    const Vec3& centroid) {
  if (members.size() < 3) return std::nullopt;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : members) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(members.size());

  // The iterative solver resolves exact zero eigenvalues cleanly where the
  // closed-form path leaves O(1e-9) residue; degeneracy detection needs that.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d evals = solver.eigenvalues();  // ascending
  // Collinear or fully degenerate member sets have no plane to fit.
  if (evals(2) <= 0.0 || evals(1) <= evals(2) * 1e-9) return std::nullopt;

  Vec3 normal = solver.eigenvectors().col(0).normalized();
  if (normal.dot(-centroid) < 0.0) normal = -normal;
  return normal;
}

void attach_normals(std::vector<Cluster>& clusters, const PointCloud& cloud) {
  std::vector<Vec3> members;
  for (Cluster& cluster : clusters) {
    members.clear();
    members.reserve(cluster.member_indices.size());
    for (int idx : cluster.member_indices) {
      members.push_back(cloud.points[static_cast<std::size_t>(idx)]);
    }
    cluster.normal = members.empty()
                         ? std::nullopt
                         : estimate_normal(members, cluster.centroid);
  }
}

double clustering_inertia(const PointCloud& points,
                          const std::vector<Cluster>& clusters) {
  double total = 0.0;
  for (const Cluster& c : clusters) {
    for (int idx : c.member_indices) {
      total +=
          (points.points[static_cast<std::size_t>(idx)] - c.centroid)
              .squaredNorm();
    }
  }
  return total;
}

}  // namespace suction
