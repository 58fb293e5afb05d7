// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "suction/prompting.hpp"
#include "suction/projection.hpp"
#include "suction/rgbd.hpp"
#include "suction/scores.hpp"

namespace suction {

/// A decider's answer: ranked labels (best first), the item names it
/// recognized, and its free-text rationale.
struct VlmDecision {
  std::vector<int> selected_labels;
  std::vector<std::string> detected_items;
  std::string rationale;
  std::string raw_response;
};

/// Returned when the target cannot be found (or nothing passes the
/// selection threshold); the robot reports the issue and goes home.
struct Refusal {
  std::string reason;
};

using DecisionOrRefusal = std::variant<VlmDecision, Refusal>;

inline bool is_refusal(const DecisionOrRefusal& d) {
  return std::holds_alternative<Refusal>(d);
}

json decision_to_json(const DecisionOrRefusal& d);
DecisionOrRefusal decision_from_json(const json& j);

/// The decider returned output that does not conform to the response
/// schema. Kept distinct from other failures so evaluation can exclude
/// format errors from its denominator.
class SchemaViolationError : public std::runtime_error {
 public:
  explicit SchemaViolationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The decider selected a marker number that was never offered.
class HallucinatedLabelError : public std::runtime_error {
 public:
  explicit HallucinatedLabelError(const std::string& what)
      : std::runtime_error(what) {}
};

/// HTTP transport failure after exhausting retries.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Replay key not present in the log.
class MissingKeyError : public std::runtime_error {
 public:
  explicit MissingKeyError(const std::string& what)
      : std::runtime_error(what) {}
};

struct ScoreWeights {
  double flatness = 0.4;
  double perpendicularity = 0.3;
  double accessibility = 0.2;
  double stability = 0.1;

  double sum() const {
    return flatness + perpendicularity + accessibility + stability;
  }
};

/// Quantitative realization of the suction-cup selection criteria
/// (flat, reachable, perpendicular, away from edges).
///
///   flatness        exp(-rms / sigma_flat) of the plane-fit residual over
///                   cloud points within cup_radius of the candidate.
///   perpendicularity max(0, cos angle(normal, approach_axis)).
///   accessibility   1 when the camera->candidate approach cylinder of
///                   radius cup_radius is clear (the target patch itself
///                   excluded); otherwise exp(-penetration / sigma_access)
///                   where penetration is how deep the worst obstruction
///                   reaches into the cylinder radially.
///   stability       angular coverage of the cup rim: cloud points within
///                   plane_band of the disk plane whose in-plane radius
///                   reaches [stability_reach, 1] * cup_radius each cover
///                   an arc of 2 pi / stability_sectors; stability is the
///                   covered fraction of the full circle. Points near an
///                   edge leave the overhanging arc uncovered. The measure
///                   depends only on relative angles, so it is exactly
///                   invariant under rigid motions.
struct ScoreParams {
  ScoreWeights weights;
  double sigma_flat = 0.002;     // m
  double cup_radius = 0.015;     // m
  double sigma_access = 0.005;   // m
  double plane_band = 0.005;     // m, out-of-plane tolerance for stability
  int stability_sectors = 24;
  // A sector only counts as supported when contact reaches almost the
  // full cup radius; seam strips from adjacent faces stop short of this.
  double stability_reach = 0.9;  // fraction of cup_radius
  double threshold = 0.5;        // minimum total for a selection

  void validate() const;

  static ScoreParams from_json(const json& j);
  json to_json() const;
};

enum class DeciderBackend { kOracle, kLive, kReplay };

std::string to_string(DeciderBackend b);
DeciderBackend decider_backend_from_string(const std::string& s);

struct DeciderConfig {
  DeciderBackend backend = DeciderBackend::kOracle;

  // live
  std::string endpoint;  // e.g. http://localhost:8080/v1/chat/completions
  std::string model = "gpt-4o";
  bool use_json_schema = true;
  std::string api_key_env = "SUCTIONPROMPT_API_KEY";
  int timeout_sec = 30;
  int max_retries = 2;

  // replay
  std::string replay_path;

  // recording (live responses are appended here when set)
  std::string record_path;

  // oracle
  ScoreParams score;

  void validate() const;

  static DeciderConfig from_json(const json& j);
  json to_json() const;
};

/// Score one candidate against the cloud. approach_axis is the direction
/// from the scene toward the camera along the optical axis (-z for an
/// untransformed camera frame); camera_origin is where approach rays start.
/// Both are parameters so that scores stay invariant under a rigid motion
/// applied jointly to cloud, candidate, axis and origin.
GeometricScores score_candidate(const SuctionCandidate& candidate,
                                const PointCloud& cloud,
                                const ScoreParams& params = ScoreParams{},
                                const Vec3& approach_axis = Vec3(0, 0, -1),
                                const Vec3& camera_origin = Vec3::Zero());

/// Deterministic stand-in for a live VLM: keep candidates whose pixel lies
/// in the target mask (when given), score them, rank by total descending
/// with ties to the lower label, and refuse when nothing qualifies.
/// Scores are written back into the candidates.
DecisionOrRefusal oracle_decide(std::vector<SuctionCandidate>& candidates,
                                const PointCloud& cloud,
                                const std::optional<Mask>& target_mask,
                                const DeciderConfig& cfg);

/// Recorded decisions keyed by scene hash, one JSON record per line.
class ReplayLog {
 public:
  static ReplayLog load(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  DecisionOrRefusal lookup(const std::string& key) const;  // MissingKeyError

  /// Append one record; creates the file if needed.
  static void append(const std::filesystem::path& path, const std::string& key,
                     const std::string& request_digest,
                     const DecisionOrRefusal& decision);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, DecisionOrRefusal> entries_;
};

DecisionOrRefusal replay_decide(const std::string& key, const ReplayLog& log);

/// One chat-style HTTP query carrying the three prompt texts and the
/// annotated image (base64 PNG), expecting a schema-conforming JSON
/// answer. offered_labels guards against hallucinated marker numbers.
/// Throws TransportError / SchemaViolationError / HallucinatedLabelError.
DecisionOrRefusal query_live(const AnnotatedImage& image,
                             const PromptBundle& prompt,
                             const std::vector<int>& offered_labels,
                             const DeciderConfig& cfg,
                             std::string* request_digest_out = nullptr);

/// Everything a decider may need for one query. Oracle scoring writes the
/// per-candidate scores back through `candidates`.
struct DecisionContext {
  const AnnotatedImage& image;
  const PromptBundle& prompt;
  std::vector<SuctionCandidate>& candidates;
  const PointCloud& cloud;
  const std::optional<Mask>& target_mask;
  std::string scene_key;
};

/// Backend-dispatching facade used by the executor and the eval harness.
class Decider {
 public:
  explicit Decider(DeciderConfig cfg);

  DecisionOrRefusal decide(const DecisionContext& ctx);

  const DeciderConfig& config() const { return cfg_; }

 private:
  DeciderConfig cfg_;
  std::optional<ReplayLog> replay_;
  std::mutex record_mutex_;
};

}  // namespace suction
