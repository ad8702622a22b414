#include "codemie/io/manifest.hpp"

#include "codemie/error.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/hash.hpp"
#include "codemie/version.hpp"

namespace codemie::io {

namespace {
using nlohmann::json;
}

RunManifest make_manifest(const std::string& command,
                          const Config& config,
                          const std::vector<std::filesystem::path>& inputs) {
    RunManifest manifest;
    manifest.command = command;
    manifest.toolkit_version = std::string(kToolkitVersion);
    manifest.config_sha256 = config_sha256(config);
    for (const auto& input : inputs) {
        manifest.input_hashes[input.generic_string()] = util::sha256_file_hex(input);
    }
    return manifest;
}

json manifest_to_json(const RunManifest& manifest) {
    return {{"command", manifest.command},
            {"toolkit_version", manifest.toolkit_version},
            {"config_sha256", manifest.config_sha256},
            {"inputs", manifest.input_hashes}};
}

RunManifest manifest_from_json(const json& j) {
    if (!j.is_object()) {
        throw DataError("manifest: expected a JSON object");
    }
    RunManifest manifest;
    auto str = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            throw DataError(std::string("manifest: missing string field \"") + key + "\"");
        }
        return it->get<std::string>();
    };
    manifest.command = str("command");
    manifest.toolkit_version = str("toolkit_version");
    manifest.config_sha256 = str("config_sha256");
    if (auto it = j.find("inputs"); it != j.end()) {
        if (!it->is_object()) {
            throw DataError("manifest: field \"inputs\" must be an object");
        }
        for (const auto& [path, hash] : it->items()) {
            if (!hash.is_string()) {
                throw DataError("manifest: input hashes must be strings");
            }
            manifest.input_hashes[path] = hash.get<std::string>();
        }
    }
    return manifest;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    util::write_file_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest load_manifest(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    return manifest_from_json(j);
}

} // namespace codemie::io
