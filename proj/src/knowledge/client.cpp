#include "codemie/knowledge/client.hpp"

#include "codemie/error.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/hash.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace codemie::knowledge {

namespace {

nlohmann::json canonical_request(const CompletionRequest& request) {
    nlohmann::json out;
    out["prompt"] = request.prompt;
    out["model"] = request.model_name;
    out["temperature"] = request.temperature;
    out["max_tokens"] = request.max_tokens;
    out["seed"] = request.seed ? nlohmann::json(*request.seed) : nlohmann::json(nullptr);
    out["images"] = request.images_b64;
    return out;
}

unsigned hash_byte(const std::string& hex, std::size_t index) {
    const std::size_t pos = (index * 2) % (hex.size() - 1);
    auto nibble = [](char c) -> unsigned {
        return c <= '9' ? static_cast<unsigned>(c - '0') : static_cast<unsigned>(c - 'a' + 10);
    };
    return nibble(hex[pos]) * 16 + nibble(hex[pos + 1]);
}

// Attribute list inside "format (...)" or its Chinese counterpart.
std::vector<std::string> format_list(const std::string& prompt) {
    std::size_t pos = prompt.find("format (");
    std::size_t open;
    if (pos != std::string::npos) {
        open = pos + 7;
    } else {
        pos = prompt.find("以 (");
        if (pos == std::string::npos) {
            return {};
        }
        open = prompt.find('(', pos);
    }
    const auto close = prompt.find(')', open);
    if (close == std::string::npos) {
        return {};
    }
    std::vector<std::string> out;
    std::string item;
    std::istringstream parts(prompt.substr(open + 1, close - open - 1));
    while (std::getline(parts, item, ',')) {
        const auto begin = item.find_first_not_of(' ');
        const auto end = item.find_last_not_of(' ');
        if (begin != std::string::npos) {
            out.push_back(item.substr(begin, end - begin + 1));
        }
    }
    return out;
}

bool is_scene_graph_format(const std::vector<std::string>& attrs) {
    return attrs.size() == 3 && attrs[0] == "subject" && attrs[1] == "object" &&
           attrs[2] == "relation";
}

} // namespace

std::string MockClient::complete(const CompletionRequest& request) {
    const auto attrs = format_list(request.prompt);
    if (attrs.empty()) {
        return "";
    }
    std::string seed_part = request.seed ? std::to_string(*request.seed) : "none";
    std::string image_part;
    for (const auto& img : request.images_b64) {
        image_part += "|" + util::sha256_hex(img);
    }
    const std::string hex = util::sha256_hex(request.prompt + "|" + request.model_name + "|" +
                                             seed_part + image_part);

    std::ostringstream out;
    if (is_scene_graph_format(attrs)) {
        static const char* kSubjects[] = {"person", "mother", "boat",   "dog",  "car",
                                          "tree",   "man",    "woman",  "infant", "bird"};
        static const char* kObjects[] = {"boat",    "table", "hat",   "ball",  "house",
                                         "bicycle", "river", "chair", "book",  "street"};
        static const char* kRelations[] = {"stand", "near",  "hold",   "above",  "left",
                                           "wear",  "ride",  "under",  "behind", "watch"};
        const unsigned row_count = 2 + hash_byte(hex, 0) % 2;
        for (unsigned k = 0; k < row_count; ++k) {
            out << "(" << kSubjects[hash_byte(hex, 1 + k * 3) % 10] << ", "
                << kObjects[hash_byte(hex, 2 + k * 3) % 10] << ", "
                << kRelations[hash_byte(hex, 3 + k * 3) % 10] << ")\n";
        }
        return out.str();
    }

    const bool chinese = request.prompt.find("未提及") != std::string::npos;
    const std::string sentinel = chinese ? "未提及" : "not mentioned";
    const unsigned row_count = 1 + hash_byte(hex, 0) % 3;
    for (unsigned k = 0; k < row_count; ++k) {
        for (std::size_t j = 0; j < attrs.size(); ++j) {
            out << (j == 0 ? "(" : ", ");
            if (j == 0) {
                out << "entity_" << hex.substr((k * 4) % 56, 4);
            } else if (j >= 2 && hash_byte(hex, 8 + k * 16 + j) % 3 == 0) {
                out << sentinel;
            } else {
                out << "value_" << k << "_" << j << "_" << hex.substr((j * 3 + k) % 56, 3);
            }
        }
        out << ")\n";
    }
    return out.str();
}

HttpCompletionClient::HttpCompletionClient(HttpClientConfig config)
    : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        throw DataError("http client: endpoint not configured");
    }
}

std::string HttpCompletionClient::complete(const CompletionRequest& request) {
    // Split into scheme://authority and route path.
    std::string base = config_.endpoint;
    std::string path = "/v1/chat/completions";
    const auto scheme_end = base.find("://");
    if (scheme_end != std::string::npos) {
        const auto path_start = base.find('/', scheme_end + 3);
        if (path_start != std::string::npos) {
            if (path_start + 1 < base.size()) {
                path = base.substr(path_start);
            }
            base = base.substr(0, path_start);
        }
    }

    nlohmann::json message;
    if (request.images_b64.empty()) {
        message = {{"role", "user"}, {"content", request.prompt}};
    } else {
        nlohmann::json parts = nlohmann::json::array();
        parts.push_back({{"type", "text"}, {"text", request.prompt}});
        for (const auto& img : request.images_b64) {
            parts.push_back({{"type", "image_url"},
                             {"image_url", {{"url", "data:image/jpeg;base64," + img}}}});
        }
        message = {{"role", "user"}, {"content", parts}};
    }
    nlohmann::json body = {{"model", request.model_name},
                           {"messages", nlohmann::json::array({message})},
                           {"temperature", request.temperature},
                           {"max_tokens", request.max_tokens}};
    if (request.seed) {
        body["seed"] = *request.seed;
    }
    const std::string payload = body.dump();

    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_sec);
    client.set_read_timeout(config_.timeout_sec);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config_.backoff_ms * (1 << (attempt - 1))));
        }
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("completion request rejected with status " +
                                 std::to_string(res->status) + ": " + res->body.substr(0, 200));
        }
        try {
            const auto doc = nlohmann::json::parse(res->body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw TransportError("completion request failed after " +
                         std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

CachingClient::CachingClient(std::unique_ptr<CompletionClient> inner,
                             std::filesystem::path cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {}

std::string CachingClient::cache_key(const CompletionRequest& request) {
    return util::sha256_hex(canonical_request(request).dump());
}

std::string CachingClient::complete(const CompletionRequest& request) {
    const auto path = cache_dir_ / (cache_key(request) + ".json");
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        nlohmann::json doc;
        try {
            in >> doc;
            return doc.at("response").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError("corrupt cache entry " + path.string() + ": " + e.what());
        }
    }
    const std::string response = inner_->complete(request);
    nlohmann::json entry = {{"request", canonical_request(request)}, {"response", response}};
    util::write_file_atomic(path, entry.dump(2) + "\n");
    return response;
}

std::unique_ptr<CompletionClient> make_client(const ClientConfig& config) {
    std::unique_ptr<CompletionClient> base;
    if (config.endpoint == "mock:" || config.endpoint.rfind("mock:", 0) == 0) {
        base = std::make_unique<MockClient>();
    } else {
        HttpClientConfig http;
        http.endpoint = config.endpoint;
        http.api_key_env = config.api_key_env;
        http.max_attempts = config.max_attempts;
        http.backoff_ms = config.backoff_ms;
        http.timeout_sec = config.timeout_sec;
        base = std::make_unique<HttpCompletionClient>(std::move(http));
    }
    if (!config.cache_dir.empty()) {
        return std::make_unique<CachingClient>(std::move(base), config.cache_dir);
    }
    return base;
}

} // namespace codemie::knowledge
