#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace codemie::knowledge {

struct CompletionRequest {
    std::string prompt;
    std::string model_name;
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<int> seed;
    std::vector<std::string> images_b64; // base64 payloads for vision requests
};

// Returns the completion content text; throws TransportError on failure.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Adapter for tests and custom backends.
class FunctionClient : public CompletionClient {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit FunctionClient(Fn fn) : fn_(std::move(fn)) {}
    std::string complete(const CompletionRequest& request) override { return fn_(request); }

private:
    Fn fn_;
};

// Deterministic offline backend: synthesizes tuple rows from a hash of the
// request, honoring the arity and language implied by the prompt.
class MockClient : public CompletionClient {
public:
    std::string complete(const CompletionRequest& request) override;
};

struct HttpClientConfig {
    std::string endpoint; // base URL, or full URL including the route path
    std::string api_key_env = "CODEMIE_API_KEY";
    int max_attempts = 3;
    int backoff_ms = 250;
    int timeout_sec = 60;
};

// Chat-completion JSON wire protocol: request {model, messages, temperature,
// max_tokens}, response {choices:[{message:{content}}]}. Retries transient
// failures with exponential backoff.
class HttpCompletionClient : public CompletionClient {
public:
    explicit HttpCompletionClient(HttpClientConfig config);
    std::string complete(const CompletionRequest& request) override;

private:
    HttpClientConfig config_;
};

// Content-addressed response cache: cache/<sha256(request)>.json. Safe for
// concurrent readers and writers (atomic file replacement).
class CachingClient : public CompletionClient {
public:
    CachingClient(std::unique_ptr<CompletionClient> inner, std::filesystem::path cache_dir);
    std::string complete(const CompletionRequest& request) override;

    static std::string cache_key(const CompletionRequest& request);

private:
    std::unique_ptr<CompletionClient> inner_;
    std::filesystem::path cache_dir_;
};

struct ClientConfig {
    std::string endpoint; // "mock:" selects the offline backend
    std::string cache_dir;
    std::string api_key_env = "CODEMIE_API_KEY";
    int max_attempts = 3;
    int backoff_ms = 250;
    int timeout_sec = 60;
};

std::unique_ptr<CompletionClient> make_client(const ClientConfig& config);

} // namespace codemie::knowledge
