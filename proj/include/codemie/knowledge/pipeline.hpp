#pragma once

#include "codemie/core/types.hpp"
#include "codemie/knowledge/client.hpp"
#include "codemie/knowledge/tuples.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace codemie::knowledge {

struct TriplicateResult {
    std::vector<RawTupleRow> rows; // deduplicated, first-occurrence order
    std::size_t skipped_lines = 0;
    std::size_t arity_dropped = 0;
    std::size_t failed_runs = 0;
    std::vector<std::string> warnings;
};

// Issues three completions, parses tuple rows, unions and deduplicates. A
// run whose transport fails (after client-level retries) contributes nothing
// and is recorded as a warning; all three failing raises TransportError.
TriplicateResult run_triplicate(const std::function<CompletionRequest(int run)>& request_builder,
                                CompletionClient& client,
                                std::optional<std::size_t> expected_arity);

struct GenerationConfig {
    std::string model_name = "text-model";
    std::string vision_model_name = "vision-model";
    double temperature = 0.7;
    int max_tokens = 1024;
    std::optional<int> seed;
    bool vary_seed_per_run = true;
    // Directory with image files for scene-graph payloads. When empty, the
    // image reference string itself is used as payload (synthetic corpora).
    std::string images_dir;
};

struct GenerationStats {
    std::size_t requests = 0;
    std::size_t rows_kept = 0;
    std::size_t skipped_lines = 0;
    std::size_t arity_dropped = 0;
    std::size_t failed_runs = 0;
    std::size_t flagged = 0;
    std::size_t dropped_no_name = 0;
    std::size_t dropped_too_few = 0;
    std::size_t dropped_duplicates = 0;
    std::vector<std::string> warnings;
    void add(const GenerationStats& other);
};

// Attribute records for every schema type with attributes, via the
// triplicate protocol and rule-based post-processing. Flagging uses the
// document's gold entities when present.
std::vector<core::AttributeRecord> generate_attributes(const core::Document& doc,
                                                       const core::EntityTypeSchema& schema,
                                                       CompletionClient& client,
                                                       const GenerationConfig& config,
                                                       GenerationStats* stats = nullptr);

// One scene graph per document image, in image_refs order.
std::vector<core::SceneGraph> generate_scene_graphs(const core::Document& doc,
                                                    CompletionClient& client,
                                                    const GenerationConfig& config,
                                                    GenerationStats* stats = nullptr);

} // namespace codemie::knowledge
