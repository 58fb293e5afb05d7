// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#include "suction/vlm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "suction/errors.hpp"

namespace suction {

json decision_to_json(const DecisionOrRefusal& d) {
  if (const auto* refusal = std::get_if<Refusal>(&d)) {
    return json{{"type", "refusal"}, {"reason", refusal->reason}};
  }
  const auto& dec = std::get<VlmDecision>(d);
  return json{{"type", "decision"},
              {"selected_labels", dec.selected_labels},
              {"detected_items", dec.detected_items},
              {"rationale", dec.rationale},
              {"raw_response", dec.raw_response}};
}

DecisionOrRefusal decision_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "refusal") {
    return Refusal{j.at("reason").get<std::string>()};
  }
  if (type != "decision") {
    throw ConfigError("decision record: unknown type '" + type + "'");
  }
  VlmDecision dec;
  dec.selected_labels = j.at("selected_labels").get<std::vector<int>>();
  dec.detected_items =
      j.at("detected_items").get<std::vector<std::string>>();
  dec.rationale = j.at("rationale").get<std::string>();
  dec.raw_response = j.value("raw_response", std::string{});
  return dec;
}

void ScoreParams::validate() const {
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("score params: weights must sum to 1");
  }
  if (threshold < 0.0 || threshold > 1.0) {
    throw ConfigError("score params: threshold must be in [0, 1]");
  }
  if (sigma_flat <= 0.0 || cup_radius <= 0.0 || sigma_access <= 0.0 ||
      plane_band <= 0.0 || stability_sectors < 4 || stability_reach <= 0.0 ||
      stability_reach > 1.0) {
    throw ConfigError("score params: invalid geometry parameters");
  }
}

ScoreParams ScoreParams::from_json(const json& j) {
  ScoreParams p;
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    p.weights.flatness = w.value("flatness", p.weights.flatness);
    p.weights.perpendicularity =
        w.value("perpendicularity", p.weights.perpendicularity);
    p.weights.accessibility =
        w.value("accessibility", p.weights.accessibility);
    p.weights.stability = w.value("stability", p.weights.stability);
  }
  p.sigma_flat = j.value("sigma_flat", p.sigma_flat);
  p.cup_radius = j.value("cup_radius", p.cup_radius);
  p.sigma_access = j.value("sigma_access", p.sigma_access);
  p.plane_band = j.value("plane_band", p.plane_band);
  p.stability_sectors = j.value("stability_sectors", p.stability_sectors);
  p.stability_reach = j.value("stability_reach", p.stability_reach);
  p.threshold = j.value("threshold", p.threshold);
  p.validate();
  return p;
}

json ScoreParams::to_json() const {
  return json{{"weights",
               {{"flatness", weights.flatness},
                {"perpendicularity", weights.perpendicularity},
                {"accessibility", weights.accessibility},
                {"stability", weights.stability}}},
              {"sigma_flat", sigma_flat},
              {"cup_radius", cup_radius},
              {"sigma_access", sigma_access},
              {"plane_band", plane_band},
              {"stability_sectors", stability_sectors},
              {"stability_reach", stability_reach},
              {"threshold", threshold}};
}

std::string to_string(DeciderBackend b) {
  switch (b) {
    case DeciderBackend::kOracle:
      return "oracle";
    case DeciderBackend::kLive:
      return "live";
    case DeciderBackend::kReplay:
      return "replay";
  }
  return "oracle";
}

DeciderBackend decider_backend_from_string(const std::string& s) {
  if (s == "oracle") return DeciderBackend::kOracle;
  if (s == "live") return DeciderBackend::kLive;
  if (s == "replay") return DeciderBackend::kReplay;
  throw ConfigError("unknown decider backend '" + s + "'");
}

void DeciderConfig::validate() const {
  score.validate();
  if (backend == DeciderBackend::kLive && endpoint.empty()) {
    throw ConfigError("decider: live backend requires an endpoint");
  }
  if (backend == DeciderBackend::kReplay && replay_path.empty()) {
    throw ConfigError("decider: replay backend requires replay_path");
  }
  if (timeout_sec <= 0 || max_retries < 0) {
    throw ConfigError("decider: invalid timeout/retry settings");
  }
}

DeciderConfig DeciderConfig::from_json(const json& j) {
  DeciderConfig cfg;
  if (j.contains("backend")) {
    cfg.backend =
        decider_backend_from_string(j.at("backend").get<std::string>());
  }
  cfg.endpoint = j.value("endpoint", cfg.endpoint);
  cfg.model = j.value("model", cfg.model);
  cfg.use_json_schema = j.value("use_json_schema", cfg.use_json_schema);
  cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
  cfg.timeout_sec = j.value("timeout_sec", cfg.timeout_sec);
  cfg.max_retries = j.value("max_retries", cfg.max_retries);
  cfg.replay_path = j.value("replay_path", cfg.replay_path);
  cfg.record_path = j.value("record_path", cfg.record_path);
  if (j.contains("score")) cfg.score = ScoreParams::from_json(j.at("score"));
  cfg.validate();
  return cfg;
}

json DeciderConfig::to_json() const {
  return json{{"backend", to_string(backend)},
              {"endpoint", endpoint},
              {"model", model},
              {"use_json_schema", use_json_schema},
              {"api_key_env", api_key_env},
              {"timeout_sec", timeout_sec},
              {"max_retries", max_retries},
              {"replay_path", replay_path},
              {"record_path", record_path},
              {"score", score.to_json()}};
}

namespace {

double flatness_score(const SuctionCandidate& c, const PointCloud& cloud,
                      const ScoreParams& p) {
  Vec3 mean = Vec3::Zero();
  int n = 0;
  const double r2 = p.cup_radius * p.cup_radius;
  for (const Vec3& q : cloud.points) {
    if ((q - c.point_camera).squaredNorm() <= r2) {
      mean += q;
      ++n;
    }
  }
  if (n < 3) return 0.0;
  mean /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& q : cloud.points) {
    if ((q - c.point_camera).squaredNorm() > r2) continue;
    const Vec3 d = q - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const double min_eval = std::max(0.0, solver.eigenvalues()(0));
  if (solver.eigenvalues()(2) <= 0.0 ||
      solver.eigenvalues()(1) <= solver.eigenvalues()(2) * 1e-9) {
    return 0.0;  // degenerate patch, no plane to seal against
  }
  const double rms = std::sqrt(min_eval);
  return std::exp(-rms / p.sigma_flat);
}

double perpendicularity_score(const SuctionCandidate& c,
                              const Vec3& approach_axis) {
  const Vec3 axis = approach_axis.normalized();
  return std::max(0.0, c.normal_camera.normalized().dot(axis));
}

double accessibility_score(const SuctionCandidate& c, const PointCloud& cloud,
                           const ScoreParams& p, const Vec3& camera_origin) {
  const Vec3 to_target = c.point_camera - camera_origin;
  const double dist = to_target.norm();
  if (dist <= p.cup_radius) return 1.0;
  const Vec3 axis = to_target / dist;
  const double reach = dist - p.cup_radius;  // stop short of the patch

  double worst_penetration = 0.0;
  const double r2 = p.cup_radius * p.cup_radius;
  for (const Vec3& q : cloud.points) {
    if ((q - c.point_camera).squaredNorm() <= r2) continue;  // target patch
    const Vec3 rel = q - camera_origin;
    const double t = rel.dot(axis);
    if (t <= 0.0 || t >= reach) continue;
    const double radial = (rel - t * axis).norm();
    if (radial >= p.cup_radius) continue;
    worst_penetration = std::max(worst_penetration, p.cup_radius - radial);
  }
  if (worst_penetration == 0.0) return 1.0;
  return std::exp(-worst_penetration / p.sigma_access);
}

double stability_score(const SuctionCandidate& c, const PointCloud& cloud,
                       const ScoreParams& p) {
  // In-plane basis around the candidate normal. Only angle differences
  // matter below, so the arbitrary seed direction cancels out.
  const Vec3 n = c.normal_camera.normalized();
  Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = (seed - seed.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);

  const double need = p.stability_reach * p.cup_radius;
  std::vector<double> angles;
  for (const Vec3& q : cloud.points) {
    const Vec3 d = q - c.point_camera;
    const double h = d.dot(n);
    if (std::abs(h) > p.plane_band) continue;
    const double x = d.dot(e1);
    const double y = d.dot(e2);
    const double r = std::hypot(x, y);
    if (r > p.cup_radius || r < need) continue;
    angles.push_back(std::atan2(y, x));
  }
  if (angles.empty()) return 0.0;

  // Each rim point covers one sector's worth of arc around itself; sum the
  // covered measure of the circle from the sorted angular gaps.
  std::sort(angles.begin(), angles.end());
  const double arc = 2.0 * M_PI / p.stability_sectors;
  double covered = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double next =
        i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2.0 * M_PI;
    covered += std::min(next - angles[i], arc);
  }
  return std::min(1.0, covered / (2.0 * M_PI));
}

}  // namespace

GeometricScores score_candidate(const SuctionCandidate& candidate,
                                const PointCloud& cloud,
                                const ScoreParams& params,
                                const Vec3& approach_axis,
                                const Vec3& camera_origin) {
  params.validate();
  GeometricScores s;
  s.flatness = flatness_score(candidate, cloud, params);
  s.perpendicularity = perpendicularity_score(candidate, approach_axis);
  s.accessibility =
      accessibility_score(candidate, cloud, params, camera_origin);
  s.stability = stability_score(candidate, cloud, params);
  s.total = params.weights.flatness * s.flatness +
            params.weights.perpendicularity * s.perpendicularity +
            params.weights.accessibility * s.accessibility +
            params.weights.stability * s.stability;
  return s;
}

DecisionOrRefusal oracle_decide(std::vector<SuctionCandidate>& candidates,
                                const PointCloud& cloud,
                                const std::optional<Mask>& target_mask,
                                const DeciderConfig& cfg) {
  const ScoreParams& params = cfg.score;
  params.validate();

  std::vector<const SuctionCandidate*> eligible;
  for (SuctionCandidate& c : candidates) {
    c.scores = score_candidate(c, cloud, params);
    if (target_mask) {
      const int px = static_cast<int>(std::lround(c.pixel.u));
      const int py = static_cast<int>(std::lround(c.pixel.v));
      if (!target_mask->at(px, py)) continue;
    }
    eligible.push_back(&c);
  }

  if (eligible.empty()) {
    return Refusal{"target not found"};
  }

  std::sort(eligible.begin(), eligible.end(),
            [](const SuctionCandidate* a, const SuctionCandidate* b) {
              if (a->scores->total != b->scores->total) {
                return a->scores->total > b->scores->total;
              }
              return a->label < b->label;
            });

  if (eligible.front()->scores->total < params.threshold) {
    return Refusal{"no candidate above threshold"};
  }

  VlmDecision decision;
  std::ostringstream rationale;
  rationale.setf(std::ios::fixed);
  rationale.precision(3);
  for (const SuctionCandidate* c : eligible) {
    if (c->scores->total < params.threshold) break;
    decision.selected_labels.push_back(c->label);
    if (decision.selected_labels.size() > 1) rationale << "; ";
    rationale << "point " << c->label << " total " << c->scores->total
              << " (flat " << c->scores->flatness << ", perp "
              << c->scores->perpendicularity << ", access "
              << c->scores->accessibility << ", stable "
              << c->scores->stability << ")";
  }
  decision.rationale = rationale.str();
  return decision;
}

ReplayLog ReplayLog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open replay log " + path.string());
  }
  ReplayLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("replay log " + path.string() + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    log.entries_[record.at("key").get<std::string>()] =
        decision_from_json(record.at("decision"));
  }
  return log;
}

bool ReplayLog::contains(const std::string& key) const {
  return entries_.count(key) != 0;
}

DecisionOrRefusal ReplayLog::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw MissingKeyError("replay log has no entry for key " + key);
  }
  return it->second;
}

void ReplayLog::append(const std::filesystem::path& path,
                       const std::string& key,
                       const std::string& request_digest,
                       const DecisionOrRefusal& decision) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw IoError("cannot append to replay log " + path.string());
  }
  const json record{{"key", key},
                    {"request_digest", request_digest},
                    {"decision", decision_to_json(decision)}};
  out << record.dump() << "\n";
}

DecisionOrRefusal replay_decide(const std::string& key, const ReplayLog& log) {
  return log.lookup(key);
}

Decider::Decider(DeciderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.backend == DeciderBackend::kReplay) {
    replay_ = ReplayLog::load(cfg_.replay_path);
  }
}

namespace {

/// Selected labels must be a subset of what was offered, whatever the
/// backend produced them.
void enforce_offered_labels(const DecisionOrRefusal& decision,
                            const std::vector<SuctionCandidate>& candidates) {
  const auto* dec = std::get_if<VlmDecision>(&decision);
  if (!dec) return;
  if (dec->selected_labels.empty()) {
    throw SchemaViolationError("decision carries no selected labels");
  }
  for (int label : dec->selected_labels) {
    const bool offered =
        std::any_of(candidates.begin(), candidates.end(),
                    [label](const SuctionCandidate& c) {
                      return c.label == label;
                    });
    if (!offered) {
      throw HallucinatedLabelError("decision references marker " +
                                   std::to_string(label) +
                                   " which is not in the candidate set");
    }
  }
}

}  // namespace

DecisionOrRefusal Decider::decide(const DecisionContext& ctx) {
  DecisionOrRefusal decision = Refusal{"unreachable"};
  switch (cfg_.backend) {
    case DeciderBackend::kOracle:
      decision =
          oracle_decide(ctx.candidates, ctx.cloud, ctx.target_mask, cfg_);
      break;
    case DeciderBackend::kReplay:
      decision = replay_decide(ctx.scene_key, *replay_);
      break;
    case DeciderBackend::kLive: {
      std::vector<int> offered;
      offered.reserve(ctx.candidates.size());
      for (const SuctionCandidate& c : ctx.candidates) {
        offered.push_back(c.label);
      }
      std::string request_digest;
      decision =
          query_live(ctx.image, ctx.prompt, offered, cfg_, &request_digest);
      if (!cfg_.record_path.empty()) {
        std::scoped_lock lock(record_mutex_);
        ReplayLog::append(cfg_.record_path, ctx.scene_key, request_digest,
                          decision);
      }
      break;
    }
  }
  enforce_offered_labels(decision, ctx.candidates);
  return decision;
}

}  // namespace suction
