#include "codemie/io/config.hpp"

#include "codemie/error.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/hash.hpp"

#include <set>
#include <string>

namespace codemie::io {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "endpoint",        "model",     "vision_model",        "temperature",
    "max_concurrency", "cache_dir", "language",            "hallucination_kinds",
    "grounding_threshold"};

} // namespace

void validate_config(const Config& config) {
    if (config.grounding_threshold <= 0.0 || config.grounding_threshold >= 1.0) {
        throw DataError("config: grounding_threshold must be inside (0, 1)");
    }
    if (config.max_concurrency < 1) {
        throw DataError("config: max_concurrency must be at least 1");
    }
    if (config.temperature < 0.0) {
        throw DataError("config: temperature must be non-negative");
    }
    if (config.endpoint.empty()) {
        throw DataError("config: endpoint must not be empty");
    }
    if (config.model_name.empty() || config.vision_model_name.empty()) {
        throw DataError("config: model names must not be empty");
    }
}

json config_to_json(const Config& config) {
    json kinds = json::array();
    for (const auto kind : config.hallucination_kinds) {
        kinds.push_back(parser::deviation_kind_name(kind));
    }
    return {{"endpoint", config.endpoint},
            {"model", config.model_name},
            {"vision_model", config.vision_model_name},
            {"temperature", config.temperature},
            {"max_concurrency", config.max_concurrency},
            {"cache_dir", config.cache_dir},
            {"language", config.language == core::Language::ZH ? "zh" : "en"},
            {"hallucination_kinds", kinds},
            {"grounding_threshold", config.grounding_threshold}};
}

Config config_from_json(const json& j) {
    if (!j.is_object()) {
        throw DataError("config: expected a JSON object");
    }
    Config config;
    for (const auto& [key, value] : j.items()) {
        if (key == "api_key" || key == "apikey" || key == "token" || key == "secret") {
            throw DataError(
                "config: API keys are read from the CODEMIE_API_KEY environment variable, "
                "never from config files");
        }
        if (!kKnownKeys.count(key)) {
            throw DataError("config: unknown key \"" + key + "\"");
        }
    }
    auto str = [&](const char* key, std::string& target) {
        if (auto it = j.find(key); it != j.end()) {
            if (!it->is_string()) {
                throw DataError(std::string("config: \"") + key + "\" must be a string");
            }
            target = it->get<std::string>();
        }
    };
    str("endpoint", config.endpoint);
    str("model", config.model_name);
    str("vision_model", config.vision_model_name);
    str("cache_dir", config.cache_dir);
    if (auto it = j.find("temperature"); it != j.end()) {
        if (!it->is_number()) {
            throw DataError("config: \"temperature\" must be a number");
        }
        config.temperature = it->get<double>();
    }
    if (auto it = j.find("max_concurrency"); it != j.end()) {
        if (!it->is_number_integer()) {
            throw DataError("config: \"max_concurrency\" must be an integer");
        }
        config.max_concurrency = it->get<int>();
    }
    if (auto it = j.find("language"); it != j.end()) {
        if (!it->is_string()) {
            throw DataError("config: \"language\" must be a string");
        }
        config.language = core::language_from_name(it->get<std::string>());
    }
    if (auto it = j.find("hallucination_kinds"); it != j.end()) {
        if (!it->is_array()) {
            throw DataError("config: \"hallucination_kinds\" must be an array of kind names");
        }
        config.hallucination_kinds.clear();
        for (const auto& name : *it) {
            if (!name.is_string()) {
                throw DataError("config: \"hallucination_kinds\" must contain only strings");
            }
            config.hallucination_kinds.insert(
                parser::deviation_kind_from_name(name.get<std::string>()));
        }
    }
    if (auto it = j.find("grounding_threshold"); it != j.end()) {
        if (!it->is_number()) {
            throw DataError("config: \"grounding_threshold\" must be a number");
        }
        config.grounding_threshold = it->get<double>();
    }
    validate_config(config);
    return config;
}

Config load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string config_sha256(const Config& config) {
    return util::sha256_hex(config_to_json(config).dump());
}

} // namespace codemie::io
