// Copyright 2026 The SuctionPrompt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace suction {

using json = nlohmann::json;

/// Parse a JSON document from disk. Throws IoError on missing/unreadable
/// files and ConfigError on parse failures (message includes the path).
json load_json_file(const std::filesystem::path& path);

/// Write a JSON document with a trailing newline. Two-space indent keeps
/// generated configs diffable.
void save_json_file(const std::filesystem::path& path, const json& doc,
                    int indent = 2);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace suction
