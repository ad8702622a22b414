#include "codemie/knowledge/pipeline.hpp"

#include "codemie/error.hpp"
#include "codemie/knowledge/prompts.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/hash.hpp"

#include <filesystem>

namespace codemie::knowledge {

void GenerationStats::add(const GenerationStats& other) {
    requests += other.requests;
    rows_kept += other.rows_kept;
    skipped_lines += other.skipped_lines;
    arity_dropped += other.arity_dropped;
    failed_runs += other.failed_runs;
    flagged += other.flagged;
    dropped_no_name += other.dropped_no_name;
    dropped_too_few += other.dropped_too_few;
    dropped_duplicates += other.dropped_duplicates;
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

TriplicateResult run_triplicate(const std::function<CompletionRequest(int run)>& request_builder,
                                CompletionClient& client,
                                std::optional<std::size_t> expected_arity) {
    TriplicateResult result;
    std::vector<RawTupleRow> all_rows;
    for (int run = 1; run <= 3; ++run) {
        const CompletionRequest request = request_builder(run);
        std::string content;
        try {
            content = client.complete(request);
        } catch (const TransportError& e) {
            ++result.failed_runs;
            result.warnings.push_back("run " + std::to_string(run) + " failed: " + e.what());
            continue;
        }
        auto parsed = parse_tuple_lines(content, expected_arity);
        result.skipped_lines += parsed.skipped_lines;
        result.arity_dropped += parsed.arity_dropped;
        for (auto& row : parsed.rows) {
            row.source_run = run;
            all_rows.push_back(std::move(row));
        }
    }
    if (result.failed_runs == 3) {
        throw TransportError("all three generation runs failed");
    }
    result.rows = dedup_rows(all_rows);
    return result;
}

namespace {

std::optional<int> run_seed(const GenerationConfig& config, int run) {
    if (!config.seed) {
        return std::nullopt;
    }
    return config.vary_seed_per_run ? std::optional<int>(*config.seed + run) : config.seed;
}

std::string image_payload(const GenerationConfig& config, const std::string& image_ref) {
    if (config.images_dir.empty()) {
        return util::base64_encode(image_ref);
    }
    const auto path = std::filesystem::path(config.images_dir) / image_ref;
    if (!std::filesystem::exists(path)) {
        throw DataError("image file not found: " + path.string());
    }
    return util::base64_encode(util::read_file(path));
}

void merge_triplicate(GenerationStats* stats, const TriplicateResult& tri) {
    if (stats == nullptr) {
        return;
    }
    stats->requests += 3;
    stats->rows_kept += tri.rows.size();
    stats->skipped_lines += tri.skipped_lines;
    stats->arity_dropped += tri.arity_dropped;
    stats->failed_runs += tri.failed_runs;
    stats->warnings.insert(stats->warnings.end(), tri.warnings.begin(), tri.warnings.end());
}

} // namespace

std::vector<core::AttributeRecord> generate_attributes(const core::Document& doc,
                                                       const core::EntityTypeSchema& schema,
                                                       CompletionClient& client,
                                                       const GenerationConfig& config,
                                                       GenerationStats* stats) {
    PostprocessOptions options;
    if (doc.gold) {
        options.known_entities = doc.gold->entities;
    }

    std::vector<core::AttributeRecord> records;
    for (const auto& etype : schema.types) {
        const auto& attrs = schema.attributes_for(etype);
        if (attrs.empty()) {
            continue; // types without attribute definitions are skipped
        }
        const std::string prompt = build_attribute_prompt(doc.text, etype, attrs, doc.language);
        auto builder = [&](int run) {
            CompletionRequest request;
            request.prompt = prompt;
            request.model_name = config.model_name;
            request.temperature = config.temperature;
            request.max_tokens = config.max_tokens;
            request.seed = run_seed(config, run);
            return request;
        };
        const auto tri = run_triplicate(builder, client, attrs.size());
        merge_triplicate(stats, tri);

        auto post = postprocess_attributes(tri.rows, etype, attrs, schema, options);
        if (stats != nullptr) {
            stats->flagged += post.flagged.size();
            stats->dropped_no_name += post.dropped_no_name;
            stats->dropped_too_few += post.dropped_too_few;
            stats->dropped_duplicates += post.dropped_duplicates;
        }
        for (auto& record : post.records) {
            records.push_back(std::move(record));
        }
    }
    return records;
}

std::vector<core::SceneGraph> generate_scene_graphs(const core::Document& doc,
                                                    CompletionClient& client,
                                                    const GenerationConfig& config,
                                                    GenerationStats* stats) {
    std::vector<core::SceneGraph> graphs;
    const std::string prompt = build_scene_graph_prompt(doc.language);
    for (const auto& image_ref : doc.image_refs) {
        const std::string payload = image_payload(config, image_ref);
        auto builder = [&](int run) {
            CompletionRequest request;
            request.prompt = prompt;
            request.model_name = config.vision_model_name;
            request.temperature = config.temperature;
            request.max_tokens = config.max_tokens;
            request.seed = run_seed(config, run);
            request.images_b64 = {payload};
            return request;
        };
        const auto tri = run_triplicate(builder, client, 3);
        merge_triplicate(stats, tri);
        graphs.push_back(postprocess_scene_graph(tri.rows, image_ref));
    }
    return graphs;
}

} // namespace codemie::knowledge
