#pragma once

#include "codemie/core/types.hpp"
#include "codemie/parser/parser.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <string>

namespace codemie::io {

/// Runtime settings shared by every command. Loaded from a JSON file; all
/// fields optional with these defaults. API keys never live here: the HTTP
/// client reads them from the CODEMIE_API_KEY environment variable.
struct Config {
    std::string endpoint = "mock:";
    std::string model_name = "text-model";
    std::string vision_model_name = "vision-model";
    double temperature = 0.7;
    int max_concurrency = 4;
    std::string cache_dir;
    core::Language language = core::Language::EN;
    std::set<parser::DeviationKind> hallucination_kinds = parser::default_hallucination_kinds();
    double grounding_threshold = 0.5;
};

// Throws on invalid values (threshold outside (0,1), concurrency < 1, ...).
void validate_config(const Config& config);

nlohmann::json config_to_json(const Config& config);
Config config_from_json(const nlohmann::json& j);

Config load_config(const std::filesystem::path& path);

/// Hash of the canonical JSON form, recorded in run manifests.
std::string config_sha256(const Config& config);

} // namespace codemie::io
