#pragma once

#include "codemie/io/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace codemie::io {

/// Replay record written next to every command's outputs. Holds content
/// hashes only, no timestamps, so reruns over identical inputs produce
/// byte-identical manifests.
struct RunManifest {
    std::string command;
    std::string toolkit_version;
    std::string config_sha256;
    std::map<std::string, std::string> input_hashes;

    bool operator==(const RunManifest&) const = default;
};

RunManifest make_manifest(const std::string& command,
                          const Config& config,
                          const std::vector<std::filesystem::path>& inputs);

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

} // namespace codemie::io
