// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Live decider backend: one chat-completions style HTTP request per query,
// image attached as a base64 PNG, response constrained to a strict JSON
// schema. Endpoint-agnostic; anything speaking the chat-completions wire
// format with image input works.

#include "suction/vlm.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

// httplib pulls in resolv.h whose _res macro clashes with Eigen internals;
// keep it after any Eigen-including header.
#include <httplib.h>

#include "suction/digest.hpp"
#include "suction/png_io.hpp"

namespace suction {

namespace {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v =
        (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(alphabet[(v >> 18) & 0x3f]);
    out.push_back(alphabet[(v >> 12) & 0x3f]);
    out.push_back(alphabet[(v >> 6) & 0x3f]);
    out.push_back(alphabet[v & 0x3f]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(alphabet[(v >> 18) & 0x3f]);
    out.push_back(alphabet[(v >> 12) & 0x3f]);
    out.append("==");
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(alphabet[(v >> 18) & 0x3f]);
    out.push_back(alphabet[(v >> 12) & 0x3f]);
    out.push_back(alphabet[(v >> 6) & 0x3f]);
    out.push_back('=');
  }
  return out;
}

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /... (never empty)
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint URL must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return SplitUrl{url, "/"};
  }
  return SplitUrl{url.substr(0, path_start), url.substr(path_start)};
}

json response_schema() {
  return json{
      {"type", "object"},
      {"properties",
       {{"selected_point_numbers",
         {{"type", "array"}, {"items", {{"type", "integer"}}}}},
        {"detected_items",
         {{"type", "array"}, {"items", {{"type", "string"}}}}},
        {"rationale", {{"type", "string"}}},
        {"target_found", {{"type", "boolean"}}}}},
      {"required",
       {"selected_point_numbers", "detected_items", "rationale",
        "target_found"}},
      {"additionalProperties", false}};
}

json build_request(const AnnotatedImage& image, const PromptBundle& prompt,
                   const DeciderConfig& cfg) {
  Rgb8Png png;
  png.width = image.pixels.width;
  png.height = image.pixels.height;
  png.data = image.pixels.data;
  const std::string b64 = base64_encode(encode_png_rgb8(png));

  json request{
      {"model", cfg.model},
      {"messages",
       json::array(
           {json{{"role", "system"}, {"content", prompt.role}},
            json{{"role", "system"}, {"content", prompt.premise}},
            json{{"role", "user"},
                 {"content",
                  json::array(
                      {json{{"type", "text"}, {"text", prompt.directive}},
                       json{{"type", "image_url"},
                            {"image_url",
                             {{"url",
                               "data:image/png;base64," + b64}}}}})}}})}};
  if (cfg.use_json_schema) {
    request["response_format"] =
        json{{"type", "json_schema"},
             {"json_schema",
              {{"name", "suction_decision"},
               {"strict", true},
               {"schema", response_schema()}}}};
  }
  return request;
}

/// Strict check of the decider's answer; any deviation from the schema is
/// a SchemaViolationError, never a silent repair.
json parse_decision_content(const std::string& content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw SchemaViolationError(std::string("response is not valid JSON: ") +
                               e.what());
  }
  if (!doc.is_object()) {
    throw SchemaViolationError("response is not a JSON object");
  }
  static const char* required[] = {"selected_point_numbers", "detected_items",
                                   "rationale", "target_found"};
  for (const char* key : required) {
    if (!doc.contains(key)) {
      throw SchemaViolationError(std::string("response missing key '") + key +
                                 "'");
    }
  }
  if (doc.size() != 4) {
    throw SchemaViolationError("response carries unexpected keys");
  }
  if (!doc["selected_point_numbers"].is_array() ||
      !doc["detected_items"].is_array() || !doc["rationale"].is_string() ||
      !doc["target_found"].is_boolean()) {
    throw SchemaViolationError("response field has wrong type");
  }
  for (const json& v : doc["selected_point_numbers"]) {
    if (!v.is_number_integer()) {
      throw SchemaViolationError("selected_point_numbers must be integers");
    }
  }
  for (const json& v : doc["detected_items"]) {
    if (!v.is_string()) {
      throw SchemaViolationError("detected_items must be strings");
    }
  }
  return doc;
}

}  // namespace

DecisionOrRefusal query_live(const AnnotatedImage& image,
                             const PromptBundle& prompt,
                             const std::vector<int>& offered_labels,
                             const DeciderConfig& cfg,
                             std::string* request_digest_out) {
  if (cfg.endpoint.empty()) {
    throw TransportError("live decider: no endpoint configured");
  }
  const SplitUrl url = split_url(cfg.endpoint);
  const std::string body = build_request(image, prompt, cfg).dump();
  if (request_digest_out) {
    *request_digest_out = Fnv1a().update(body).hex();
  }

  httplib::Headers headers;
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (!key) key = std::getenv("OPENAI_API_KEY");
  if (key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(url.base);
  client.set_connection_timeout(cfg.timeout_sec);
  client.set_read_timeout(cfg.timeout_sec);
  client.set_write_timeout(cfg.timeout_sec);

  httplib::Result res;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
    }
    res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    break;
  }
  if (!res) {
    throw TransportError("live decider: " + last_error);
  }
  if (res->status != 200) {
    throw TransportError("live decider: HTTP " + std::to_string(res->status) +
                         ": " + res->body);
  }

  json envelope;
  try {
    envelope = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw SchemaViolationError(
        std::string("response envelope is not valid JSON: ") + e.what());
  }
  std::string content;
  try {
    content = envelope.at("choices").at(0).at("message").at("content")
                  .get<std::string>();
  } catch (const json::exception&) {
    throw SchemaViolationError(
        "response envelope has no choices[0].message.content");
  }

  const json doc = parse_decision_content(content);

  if (!doc["target_found"].get<bool>()) {
    std::string reason = doc["rationale"].get<std::string>();
    if (reason.empty()) reason = "target not found";
    return Refusal{reason};
  }

  VlmDecision decision;
  decision.selected_labels = doc["selected_point_numbers"].get<std::vector<int>>();
  decision.detected_items =
      doc["detected_items"].get<std::vector<std::string>>();
  decision.rationale = doc["rationale"].get<std::string>();
  decision.raw_response = content;

  if (decision.selected_labels.empty()) {
    throw SchemaViolationError(
        "target_found is true but no point was selected");
  }
  for (int label : decision.selected_labels) {
    if (std::find(offered_labels.begin(), offered_labels.end(), label) ==
        offered_labels.end()) {
      throw HallucinatedLabelError("decider selected marker " +
                                   std::to_string(label) +
                                   " which is not in the candidate set");
    }
  }
  return decision;
}

}  // namespace suction
