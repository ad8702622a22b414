#pragma once

#include "codemie/core/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace codemie::knowledge {

struct RawTupleRow {
    std::vector<std::string> values;
    int source_run = 0; // 1..3 once stamped by the triplicate driver
};

struct ParsedTuples {
    std::vector<RawTupleRow> rows;
    std::size_t skipped_lines = 0;
    std::size_t arity_dropped = 0;
};

// Extracts one parenthesized comma-separated row per line. Non-matching
// lines are skipped and counted; rows of the wrong arity are dropped and
// counted when expected_arity is set.
ParsedTuples parse_tuple_lines(const std::string& raw,
                               std::optional<std::size_t> expected_arity = std::nullopt);

// Deduplicates by normalized value tuple, keeping first occurrences.
std::vector<RawTupleRow> dedup_rows(const std::vector<RawTupleRow>& rows);

struct PostprocessOptions {
    // Flagging source: a record is flagged for review when its name equals a
    // known entity surface of a different type.
    std::vector<core::Entity> known_entities;
};

struct PostprocessResult {
    std::vector<core::AttributeRecord> records;
    std::vector<std::size_t> flagged; // indices into records
    std::size_t dropped_no_name = 0;
    std::size_t dropped_too_few = 0;
    std::size_t dropped_duplicates = 0;
};

// Zips attrs with row values, drops not-mentioned and empty values, drops
// records without a name or with fewer than two surviving attributes,
// deduplicates, and flags suspected cross-type confusions.
PostprocessResult postprocess_attributes(const std::vector<RawTupleRow>& rows,
                                         const std::string& etype,
                                         const std::vector<std::string>& attrs,
                                         const core::EntityTypeSchema& schema,
                                         const PostprocessOptions& options = {});

// Normalization dedup only; subjects, objects and relations are free-form.
core::SceneGraph postprocess_scene_graph(const std::vector<RawTupleRow>& rows,
                                         const std::string& image_ref);

} // namespace codemie::knowledge
